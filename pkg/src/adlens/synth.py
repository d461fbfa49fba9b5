"""Synthetic ad corpus with known stance/issue ground truth.

Entities get a hidden side; explicit ones get side-revealing names that
the entity-name rules recover exactly, implicit ones get neutral names.
Each ad is a stance template plus issue phrases plus noise, and its gold
labels are the generating templates', so an end-to-end run can be scored
against construction-time truth. Fully deterministic by seed.

The default banks keep their content vocabularies pairwise disjoint
(candidate names and function words aside): shared topical words would
leak PMI mass across issues and blur the stance signal. bank_collisions()
reports violations and is pinned by a test.
"""

from __future__ import annotations

import datetime as dt
import json
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from adlens.corpus import AGE_BUCKETS, AdCorpus, AdRecord, GENDERS
from adlens.errors import DataError
from adlens.infer import HoldoutRow
from adlens.labels import opponent, stance_label
from adlens.lexicon import IssueDocCorpus
from adlens.textproc import STOPWORDS, tokenize

STANCE_TEMPLATES: dict[str, list[str]] = {
    "pro-biden": [
        "vote for joe biden this fall",
        "join the biden harris team today",
        "elect joe biden and restore decency",
        "stand with joe and kamala",
        "biden will unite our nation",
        "cast your ballot for joe biden",
        "joe biden brings steady leadership",
        "win this race with joe biden",
    ],
    "pro-trump": [
        "keep america great with president trump",
        "re-elect president trump this november",
        "president trump fights for american workers",
        "four more years of president trump",
        "president trump delivers real results",
        "rally behind president trump",
        "president trump puts america first",
        "trump stands strong for the heartland",
    ],
    "anti-biden": [
        "stop sleepy joe biden",
        "the radical left controls joe biden",
        "say no to biden and the socialists",
        "joe biden is weak and wrong",
        "sleepy joe takes orders from the far left",
        "the radical biden agenda has to be stopped",
        "biden would surrender to the mob",
        "crooked deals follow joe biden everywhere",
    ],
    "anti-trump": [
        "defeat donald trump in this election",
        "trump has failed our country",
        "hold donald trump accountable",
        "send donald trump packing",
        "trump broke all his promises",
        "enough of donald trump and his chaos",
        "retire donald trump for good",
        "trump divides us every single day",
    ],
}

ISSUE_PHRASES: dict[str, list[str]] = {
    "covid": [
        "crush the coronavirus pandemic",
        "wear masks and save lives",
        "deliver a safe vaccine quickly",
        "expand rapid testing for the virus",
        "listen to doctors and nurses",
        "reopen schools safely after the outbreak",
        "shield the elderly from the pandemic",
    ],
    "economy and taxes": [
        "rebuild our economy and create jobs",
        "cut taxes for working families",
        "raise wages for every worker",
        "help small businesses hire again",
        "bring manufacturing jobs home",
        "grow paychecks not the deficit",
        "strengthen the middle class economy",
    ],
    "healthcare": [
        "protect healthcare coverage for all patients",
        "lower prescription drug prices",
        "preserve medicare and medicaid",
        "cover preexisting conditions always",
        "push insurance premiums lower",
        "boost rural hospital funding",
        "guarantee quality care for seniors",
    ],
    "immigration": [
        "secure the border now",
        "fix our broken immigration system",
        "end illegal immigration and amnesty",
        "welcome refugees and asylum seekers",
        "build the wall higher",
        "give dreamers a path to citizenship",
        "reform visas for skilled immigrants",
    ],
    "climate": [
        "fight climate change with clean energy",
        "invest in solar and wind power",
        "slash carbon emissions in half",
        "polluters must pay for the mess",
        "ban fracking near our water",
        "lead the world on renewable energy",
        "plant trees and revive wetlands",
    ],
    "guns": [
        "defend the second amendment",
        "pass universal background checks",
        "curb gun violence in our streets",
        "respect hunters and sportsmen",
        "take firearms away from criminals",
        "face down the gun lobby",
        "support responsible gun owners",
    ],
}

# Doc-only padding: gives P(w) mass in the news corpus without ever
# reaching the ads, so an unlucky PMI pass cannot create stray ad edges.
FILLER_PHRASES = [
    "read the full statement online",
    "share this message with friends",
    "officials spoke at the press conference",
    "the papers released new figures",
    "volunteers knocked on doors this weekend",
    "reporters covered the town hall",
]

# Ad-only noise: absent from the issue docs, so never lexicon material.
NOISE_TOKENS = [
    "community", "neighbors", "tomorrow", "together", "local", "voices",
    "leaders", "story", "journey", "moment", "spirit", "morning",
    "update", "weekly", "roundup", "meeting",
]

# Tokens legitimately shared between banks: candidate names only (a stance
# pair needs them on both its pro and anti sides).
_SHARED_OK = frozenset({"biden", "joe", "kamala", "harris", "trump", "donald", "pence"})

_IMPLICIT_NAME_HEADS = [
    "PRAIRIE", "UNION", "LIBERTY", "HERITAGE", "FRONTIER", "MAIN STREET",
    "CIVIC", "VALLEY", "SUMMIT", "HORIZON", "COMPASS", "ANCHOR", "BEACON",
    "RIVERSIDE", "GRANITE", "SUNRISE", "LAKESIDE", "MERIDIAN", "PINNACLE",
    "CORNERSTONE",
]
_IMPLICIT_NAME_TAILS = ["PAC", "FUND", "ALLIANCE", "PROJECT", "COALITION", "ACTION", "2020"]

_PRO_NAME_PATTERNS = [
    "{cand} FOR PRESIDENT",
    "COMMITTEE TO RE-ELECT {cand}",
    "FRIENDS OF {cand}",
    "{cand} VICTORY FUND",
]

_CAND_NAMES = {"trump": "TRUMP", "biden": "BIDEN"}
_STATES = ["Pennsylvania", "New York", "Idaho", "Florida", "Ohio", "Texas", "Michigan"]


def bank_collisions() -> dict[str, set[str]]:
    """Content tokens appearing in more than one bank (should be empty).

    Keys are "bank-a|bank-b" pairs; function words and candidate names are
    exempt. Noise tokens are checked against everything.
    """
    banks: dict[str, set[str]] = {}
    for stance, phrases in STANCE_TEMPLATES.items():
        banks[f"stance:{stance}"] = {
            t for p in phrases for t in tokenize(p) if t not in STOPWORDS
        }
    for issue, phrases in ISSUE_PHRASES.items():
        banks[f"issue:{issue}"] = {
            t for p in phrases for t in tokenize(p) if t not in STOPWORDS
        }
    banks["noise"] = set(NOISE_TOKENS)
    names = sorted(banks)
    collisions: dict[str, set[str]] = {}
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            shared = (banks[a] & banks[b]) - _SHARED_OK
            if shared:
                collisions[f"{a}|{b}"] = shared
    return collisions


@dataclass
class SynthSpec:
    explicit_per_side: int = 2
    implicit_per_side: int = 18
    ads_per_entity: int = 10
    issues: list[str] = field(
        default_factory=lambda: ["covid", "economy and taxes", "healthcare", "immigration"]
    )
    noise_rate: float = 0.2
    seed: int = 42
    own_stance_prob: float = 0.5  # pro-own template vs anti-opponent template
    second_issue_prob: float = 0.25
    docs_per_issue: int = 12

    def __post_init__(self):
        for issue in self.issues:
            if issue not in ISSUE_PHRASES:
                raise DataError(
                    f"no phrase bank for issue {issue!r}; available: {sorted(ISSUE_PHRASES)}"
                )
        if self.explicit_per_side < 0 or self.implicit_per_side < 0:
            raise ValueError("entity counts must be nonnegative")
        if self.ads_per_entity < 1:
            raise ValueError("need at least one ad per entity")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError("noise_rate must be in [0, 1]")
        if not 0.0 <= self.own_stance_prob <= 1.0:
            raise ValueError("own_stance_prob must be in [0, 1]")

    @classmethod
    def load(cls, path: str | Path) -> "SynthSpec":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise DataError(f"cannot load synth spec from {path}: {exc}") from exc
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise DataError(f"unknown synth spec fields: {sorted(unknown)}")
        return cls(**raw)


@dataclass
class _Entity:
    name: str
    side: str  # trump | biden
    explicit: bool


def _make_entities(spec: SynthSpec, rng: np.random.Generator) -> list[_Entity]:
    entities: list[_Entity] = []
    for side in ("trump", "biden"):
        for _ in range(spec.explicit_per_side):
            # Pro-pattern names only (the archetypal "X FOR PRESIDENT" case):
            # the anti-opponent ads of such entities then reach the anti
            # stance nodes purely through the cross-candidate rule, which
            # keeps those nodes' training text on-template.
            pattern = _PRO_NAME_PATTERNS[int(rng.integers(len(_PRO_NAME_PATTERNS)))]
            name = pattern.format(cand=_CAND_NAMES[side])
            existing = {e.name for e in entities}
            if name in existing:
                name = f"{name} {len(entities)}"
            entities.append(_Entity(name=name, side=side, explicit=True))
        for _ in range(spec.implicit_per_side):
            head = _IMPLICIT_NAME_HEADS[int(rng.integers(len(_IMPLICIT_NAME_HEADS)))]
            tail = _IMPLICIT_NAME_TAILS[int(rng.integers(len(_IMPLICIT_NAME_TAILS)))]
            name = f"{head} {tail}"
            suffix = 2
            existing = {e.name for e in entities}
            while name in existing:
                name = f"{head} {tail} {suffix}"
                suffix += 1
            entities.append(_Entity(name=name, side=side, explicit=False))
    return entities


def _compose_text(
    entity: _Entity, spec: SynthSpec, rng: np.random.Generator
) -> tuple[str, str, str]:
    """Returns (text, gold_stance, gold_issue) for one ad."""
    if rng.random() < spec.own_stance_prob:
        stance = stance_label("pro", entity.side)
    else:
        stance = stance_label("anti", opponent(entity.side))
    issue = spec.issues[int(rng.integers(len(spec.issues)))]

    bank = STANCE_TEMPLATES[stance]
    stance_picks = rng.choice(len(bank), size=2, replace=False)
    phrases = [bank[int(i)] for i in stance_picks]
    issue_bank = ISSUE_PHRASES[issue]
    picks = rng.choice(len(issue_bank), size=2, replace=False)
    phrases.extend(issue_bank[int(i)] for i in picks)
    if len(spec.issues) > 1 and rng.random() < spec.second_issue_prob:
        others = [i for i in spec.issues if i != issue]
        second_bank = ISSUE_PHRASES[others[int(rng.integers(len(others)))]]
        phrases.append(second_bank[int(rng.integers(len(second_bank)))])

    tokens: list[str] = []
    for phrase in phrases:
        tokens.extend(phrase.split())
    n_noise = int(round(spec.noise_rate * len(tokens)))
    for _ in range(n_noise):
        pos = int(rng.integers(len(tokens) + 1))
        tokens.insert(pos, NOISE_TOKENS[int(rng.integers(len(NOISE_TOKENS)))])
    sentence = " ".join(tokens)
    return sentence.capitalize() + ".", stance, issue


def _random_dist(
    rng: np.random.Generator, keys: tuple[str, ...], skew: np.ndarray | None = None
) -> dict[str, float]:
    weights = rng.dirichlet(np.ones(len(keys)) * 2.0)
    if skew is not None:
        weights = weights * skew
        weights = weights / weights.sum()
    # Floor at 6 decimals: a rounded sum must never exceed 1.
    return {k: int(float(w) * 1e6) / 1e6 for k, w in zip(keys, weights)}


def generate(spec: SynthSpec) -> tuple[AdCorpus, list[HoldoutRow], IssueDocCorpus]:
    """Build (corpus, gold labels, issue doc corpus) from a synth spec."""
    rng = np.random.default_rng(spec.seed)
    entities = _make_entities(spec, rng)
    ads: list[AdRecord] = []
    gold: list[HoldoutRow] = []
    base_day = dt.date(2020, 6, 1)
    ad_counter = 0
    for entity in entities:
        for _ in range(spec.ads_per_entity):
            text, stance, issue = _compose_text(entity, spec, rng)
            start = base_day + dt.timedelta(days=int(rng.integers(0, 150)))
            span = int(rng.integers(0, 5))
            stop = start + dt.timedelta(days=span) if rng.random() > 0.2 else None
            imp_lo = 1000 * int(rng.integers(1, 100))
            imp_hi = imp_lo + 1000 * int(rng.integers(1, 50))
            spend_lo = 100 * int(rng.integers(1, 50))
            spend_hi = spend_lo + 100 * int(rng.integers(1, 20))
            female_skew = stance in ("pro-biden", "anti-trump")
            gender_skew = (
                np.array([0.8, 1.25, 0.4]) if female_skew else np.array([1.25, 0.8, 0.4])
            )
            n_regions = int(rng.integers(2, 5))
            region_picks = rng.choice(len(_STATES), size=n_regions, replace=False)
            regions = tuple(_STATES[int(i)] for i in region_picks)
            ad_id = f"ad{ad_counter:05d}"
            ad_counter += 1
            ads.append(
                AdRecord(
                    id=ad_id,
                    text=text,
                    funding_entity=entity.name,
                    created=start,
                    delivery_start=start,
                    delivery_stop=stop,
                    spend=(spend_lo, spend_hi),
                    impressions=(imp_lo, imp_hi),
                    gender_dist=_random_dist(rng, GENDERS, gender_skew),
                    age_dist=_random_dist(rng, AGE_BUCKETS),
                    region_dist=_random_dist(rng, regions),
                )
            )
            gold.append(HoldoutRow(ad_id=ad_id, stance=stance, issue=issue))

    docs: list[tuple[str, list[str]]] = []
    for issue in spec.issues:
        bank = ISSUE_PHRASES[issue]
        for _ in range(spec.docs_per_issue):
            n_phrases = int(rng.integers(5, 9))
            picks = rng.choice(len(bank), size=min(n_phrases, len(bank)), replace=False)
            phrases = [bank[int(i)] for i in picks]
            phrases.append(FILLER_PHRASES[int(rng.integers(len(FILLER_PHRASES)))])
            phrases.append(FILLER_PHRASES[int(rng.integers(len(FILLER_PHRASES)))])
            order = rng.permutation(len(phrases))
            text = " ".join(phrases[int(i)] for i in order)
            docs.append((issue, tokenize(text)))
    return AdCorpus(ads), gold, IssueDocCorpus(docs)


def save_gold(gold: list[HoldoutRow], path: str | Path) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ad_id", "stance", "issue"])
        for row in gold:
            writer.writerow([row.ad_id, row.stance, row.issue])


def save_issue_docs(issue_corpus: IssueDocCorpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for issue, tokens in issue_corpus.docs:
            fh.write(json.dumps({"issue": issue, "text": " ".join(tokens)}) + "\n")


def save_ads_jsonl(corpus: AdCorpus, path: str | Path) -> None:
    from adlens.corpus import record_to_json

    with open(path, "w", encoding="utf-8") as fh:
        for ad in corpus.ads:
            fh.write(json.dumps(record_to_json(ad)) + "\n")
