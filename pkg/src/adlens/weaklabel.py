"""Stance weak labels from funding-entity names.

An entity is "explicit" when its name carries a candidate or party term;
a negation cue anywhere in the name flips the polarity to anti. Ads of
explicit entities inherit the entity stance, plus the inverted stance
toward the opposing candidate when the ad text mentions them.

All cue matching is whole-word on lowercased tokens ("outreach" must not
trigger "out", "Harrison" must not trigger "harris").
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from adlens.errors import DataError
from adlens.labels import opponent, stance_label
from adlens.textproc import TokenSeq, tokenize

TRUMP_TERMS = frozenset({"trump", "pence"})
BIDEN_TERMS = frozenset({"biden", "harris"})
TRUMP_PARTY_TERMS = frozenset({"republican", "republicans", "gop"})
BIDEN_PARTY_TERMS = frozenset({"democrat", "democrats", "democratic"})
NEGATION_TERMS = frozenset({"dump", "lie", "out", "fail", "against"})


@dataclass(frozen=True)
class EntityStance:
    candidate: str  # trump | biden
    polarity: str  # pro | anti

    def __post_init__(self):
        stance_label(self.polarity, self.candidate)  # validates both parts

    @property
    def label(self) -> str:
        return stance_label(self.polarity, self.candidate)


@dataclass
class CueConfig:
    """Overridable cue-word lists; defaults mirror the module constants."""

    trump_terms: frozenset[str] = TRUMP_TERMS
    biden_terms: frozenset[str] = BIDEN_TERMS
    trump_party_terms: frozenset[str] = TRUMP_PARTY_TERMS
    biden_party_terms: frozenset[str] = BIDEN_PARTY_TERMS
    negation_terms: frozenset[str] = NEGATION_TERMS

    @classmethod
    def load(cls, path: str | Path) -> "CueConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise DataError(f"cannot load cue config from {path}: {exc}") from exc
        def pick(key: str, default: frozenset[str]) -> frozenset[str]:
            if key not in raw:
                return default
            return frozenset(str(w).lower() for w in raw[key])
        return cls(
            trump_terms=pick("trump_terms", TRUMP_TERMS),
            biden_terms=pick("biden_terms", BIDEN_TERMS),
            trump_party_terms=pick("trump_party_terms", TRUMP_PARTY_TERMS),
            biden_party_terms=pick("biden_party_terms", BIDEN_PARTY_TERMS),
            negation_terms=pick("negation_terms", NEGATION_TERMS),
        )


DEFAULT_CUES = CueConfig()


def classify_entity_name(name: str, cues: CueConfig = DEFAULT_CUES) -> EntityStance | None:
    """Stance of a funding entity from its name, or None for implicit entities.

    Candidate/party terms pick the side; any negation cue makes it anti.
    Names naming both sides are treated as implicit (ambiguous).
    """
    tokens = set(tokenize(name))
    trump_hit = bool(tokens & (cues.trump_terms | cues.trump_party_terms))
    biden_hit = bool(tokens & (cues.biden_terms | cues.biden_party_terms))
    if trump_hit == biden_hit:  # neither, or ambiguous both
        return None
    candidate = "trump" if trump_hit else "biden"
    polarity = "anti" if tokens & cues.negation_terms else "pro"
    return EntityStance(candidate=candidate, polarity=polarity)


def derive_ad_stances(
    entity: EntityStance,
    ad_tokens: TokenSeq,
    cues: CueConfig = DEFAULT_CUES,
) -> frozenset[str]:
    """Weak stance labels for one ad of an explicit entity.

    Always contains the entity's own stance; mentioning the opposing
    candidate adds the inverted-polarity stance toward that opponent
    (pro-trump entity + "biden" in the ad -> anti-biden, and vice versa).
    The result can never pair pro-X with anti-X.
    """
    labels = {entity.label}
    other = opponent(entity.candidate)
    opponent_terms = cues.biden_terms if other == "biden" else cues.trump_terms
    if set(ad_tokens) & opponent_terms:
        inverted = "anti" if entity.polarity == "pro" else "pro"
        labels.add(stance_label(inverted, other))
    return frozenset(labels)


@dataclass
class WeakLabels:
    """Weak-supervision output over a corpus: entity stances + ad stance sets."""

    entity_stances: dict[str, EntityStance]
    ad_stances: dict[str, frozenset[str]]

    def counts(self) -> dict:
        return {
            "explicit_entities": len(self.entity_stances),
            "weakly_labeled_ads": len(self.ad_stances),
        }

    def save(self, path: str | Path) -> None:
        payload = {
            "entities": {
                name: {"candidate": s.candidate, "polarity": s.polarity}
                for name, s in sorted(self.entity_stances.items())
            },
            "ads": {ad_id: sorted(labels) for ad_id, labels in sorted(self.ad_stances.items())},
            "counts": self.counts(),
        }
        Path(path).write_text(json.dumps(payload, indent=1), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "WeakLabels":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
            entity_stances = {
                name: EntityStance(candidate=spec["candidate"], polarity=spec["polarity"])
                for name, spec in raw["entities"].items()
            }
            ad_stances = {
                ad_id: frozenset(labels) for ad_id, labels in raw["ads"].items()
            }
            return cls(entity_stances=entity_stances, ad_stances=ad_stances)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise DataError(f"cannot load weak labels from {path}: {exc}") from exc


def label_corpus(corpus, cues: CueConfig = DEFAULT_CUES) -> WeakLabels:
    """Classify every funding entity and weak-label the explicit entities' ads."""
    entity_stances: dict[str, EntityStance] = {}
    ad_stances: dict[str, frozenset[str]] = {}
    for name, entity in corpus.entities().items():
        stance = classify_entity_name(name, cues)
        if stance is None:
            continue
        entity_stances[name] = stance
        entity.explicit_stance = stance
        for ad_id in entity.ad_ids:
            ad = corpus.by_id[ad_id]
            ad_stances[ad_id] = derive_ad_stances(stance, tokenize(ad.text), cues)
    return WeakLabels(entity_stances=entity_stances, ad_stances=ad_stances)
