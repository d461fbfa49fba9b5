"""PMI issue lexicon: build from an issue-tagged doc corpus, match against ads.

PMI(w, i) = ln( P(w|i) / P(w) ) over raw token-frequency estimates, no
smoothing: a word unseen within an issue scores -inf there. Only unigrams
enter the lexicon proper; bigram/trigram counts are exposed for reporting.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from adlens.errors import DataError, UndefinedPMIError
from adlens.labels import ISSUES
from adlens.textproc import TokenSeq, ngrams, tokenize

DEFAULT_PMI_THRESHOLD = 0.5  # natural-log units


@dataclass
class IssueDocCorpus:
    """(issue, tokens) documents; issues must come from the canonical set."""

    docs: list[tuple[str, TokenSeq]]

    def __post_init__(self):
        for issue, _ in self.docs:
            if issue not in ISSUES:
                raise DataError(f"unknown issue label {issue!r}")

    def issues_present(self) -> list[str]:
        present = {issue for issue, _ in self.docs}
        return [issue for issue in ISSUES if issue in present]


@dataclass
class LexiconEntry:
    issue: str
    pmi: float


@dataclass
class IssueLexicon:
    entries: dict[str, LexiconEntry]
    threshold: float = DEFAULT_PMI_THRESHOLD

    def __post_init__(self):
        for word, entry in self.entries.items():
            if entry.pmi < self.threshold:
                raise ValueError(
                    f"lexicon entry {word!r} has pmi {entry.pmi} below threshold"
                )

    def __len__(self) -> int:
        return len(self.entries)

    def words(self) -> list[str]:
        return sorted(self.entries)

    def save(self, path: str | Path) -> None:
        payload = {
            "threshold": self.threshold,
            "entries": {
                word: {"issue": e.issue, "pmi": e.pmi}
                for word, e in sorted(self.entries.items())
            },
        }
        Path(path).write_text(json.dumps(payload, indent=1), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "IssueLexicon":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
            entries = {
                word: LexiconEntry(issue=spec["issue"], pmi=float(spec["pmi"]))
                for word, spec in payload["entries"].items()
            }
            return cls(entries=entries, threshold=float(payload["threshold"]))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise DataError(f"cannot load lexicon from {path}: {exc}") from exc


@dataclass
class _NgramCounts:
    per_issue: dict[str, Counter]
    issue_totals: dict[str, int]
    overall: Counter
    total: int


def _count(corpus: IssueDocCorpus, n: int = 1) -> _NgramCounts:
    per_issue: dict[str, Counter] = {issue: Counter() for issue in corpus.issues_present()}
    overall: Counter = Counter()
    for issue, tokens in corpus.docs:
        grams = ngrams(tokens, n)
        per_issue[issue].update(grams)
        overall.update(grams)
    issue_totals = {issue: sum(c.values()) for issue, c in per_issue.items()}
    return _NgramCounts(per_issue, issue_totals, overall, sum(overall.values()))


def _pmi_from_counts(counts: _NgramCounts, gram: str, issue: str) -> float:
    c_all = counts.overall.get(gram, 0)
    if c_all == 0:
        raise UndefinedPMIError(f"{gram!r} does not occur in the corpus")
    c_issue = counts.per_issue.get(issue, Counter()).get(gram, 0)
    if c_issue == 0:
        return -math.inf
    p_cond = c_issue / counts.issue_totals[issue]
    p_marg = c_all / counts.total
    return math.log(p_cond / p_marg)


def pmi(word: str, issue: str, corpus: IssueDocCorpus) -> float:
    """Natural-log PMI of a unigram with an issue; -inf when unseen in-issue."""
    if issue not in ISSUES:
        raise DataError(f"unknown issue label {issue!r}")
    return _pmi_from_counts(_count(corpus, 1), word, issue)


def build_lexicon(
    corpus: IssueDocCorpus, threshold: float = DEFAULT_PMI_THRESHOLD
) -> IssueLexicon:
    """Assign each unigram to its argmax-PMI issue; keep scores >= threshold.

    Ties break by canonical issue order. Doc order within an issue cannot
    matter: only aggregate counts enter the computation.
    """
    if not corpus.docs:
        raise DataError("issue corpus is empty")
    counts = _count(corpus, 1)
    issues = corpus.issues_present()
    entries: dict[str, LexiconEntry] = {}
    for word in counts.overall:
        best_issue = None
        best = -math.inf
        for issue in issues:  # canonical order makes ties deterministic
            score = _pmi_from_counts(counts, word, issue)
            if score > best:
                best, best_issue = score, issue
        if best >= threshold and best_issue is not None:
            entries[word] = LexiconEntry(issue=best_issue, pmi=best)
    return IssueLexicon(entries=entries, threshold=threshold)


def ngram_count_table(
    corpus: IssueDocCorpus,
    threshold: float = DEFAULT_PMI_THRESHOLD,
    max_n: int = 3,
) -> dict[str, dict[str, int]]:
    """Per-issue counts of n-grams whose argmax PMI clears the threshold.

    Reporting only (the lexicon itself stays unigram); shaped like
    {issue: {"1": c1, "2": c2, "3": c3}}.
    """
    issues = corpus.issues_present()
    table = {issue: {} for issue in issues}
    for n in range(1, max_n + 1):
        counts = _count(corpus, n)
        kept = Counter()
        for gram in counts.overall:
            best_issue = None
            best = -math.inf
            for issue in issues:
                score = _pmi_from_counts(counts, gram, issue)
                if score > best:
                    best, best_issue = score, issue
            if best >= threshold and best_issue is not None:
                kept[best_issue] += 1
        for issue in issues:
            table[issue][str(n)] = kept.get(issue, 0)
    return table


def match_issues(ad_tokens: TokenSeq, lex: IssueLexicon) -> set[tuple[str, str]]:
    """Distinct (word, issue) pairs for lexicon words present in the ad."""
    hits = set()
    for token in set(ad_tokens):
        entry = lex.entries.get(token)
        if entry is not None:
            hits.add((token, entry.issue))
    return hits


def load_issue_docs(path: str | Path) -> IssueDocCorpus:
    """Read {issue, text} JSONL into a tokenized issue corpus."""
    docs: list[tuple[str, TokenSeq]] = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            docs.append((str(raw["issue"]), tokenize(str(raw["text"]))))
        except (ValueError, KeyError, TypeError) as exc:
            raise DataError(f"{path}:{lineno}: bad issue doc: {exc}") from exc
    return IssueDocCorpus(docs)
