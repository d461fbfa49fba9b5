"""Tokenization, n-grams, and frequency counts.

Shared by lexicon building, graph construction, and the trigram analyses.
Tokenizer policy: lowercase, split on Unicode whitespace, strip punctuation
only from token edges (so "far-left," -> "far-left" but "taxes&amnesty"
survives intact). No stemming, no subword units.
"""

from __future__ import annotations

import unicodedata
from collections import Counter
from pathlib import Path

TokenSeq = list[str]

# Function words used only to suppress all-stopword n-grams in frequency
# displays. Never applied to PMI counting.
STOPWORDS = frozenset(
    """
    a about above after again against all am an and any are aren't as at be
    because been before being below between both but by can can't cannot could
    couldn't did didn't do does doesn't doing don't down during each few for
    from further had hadn't has hasn't have haven't having he he'd he's her
    here here's hers herself him himself his how how's i i'd i'll i'm i've if
    in into is isn't it it's its itself let's me more most mustn't my myself
    no nor not of off on once only or other ought our ours ourselves out over
    own same shan't she she'd she's should shouldn't so some such than that
    that's the their theirs them themselves then there there's these they
    they'd they'll they're they've this those through to too under until up
    very was wasn't we we'd we'll we're we've were weren't what what's when
    when's where where's which while who who's whom why why's with won't would
    wouldn't you you'd you'll you're you've your yours yourself yourselves
    """.split()
)


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> TokenSeq:
    """Lowercase and split `text`; returns [] for empty/whitespace input."""
    out = []
    for raw in text.lower().split():
        start, end = 0, len(raw)
        while start < end and _is_punct(raw[start]):
            start += 1
        while end > start and _is_punct(raw[end - 1]):
            end -= 1
        if end > start:
            out.append(raw[start:end])
    return out


def ngrams(seq: TokenSeq, n: int) -> list[str]:
    """Contiguous n-grams of `seq`, space-joined. len = max(0, len(seq)-n+1)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return [" ".join(seq[i : i + n]) for i in range(len(seq) - n + 1)]


def top_k_ngrams(
    texts: list[TokenSeq],
    n: int,
    k: int | None,
    stopset: frozenset[str] | set[str] = STOPWORDS,
) -> list[tuple[str, int]]:
    """Most frequent n-grams across `texts`, count-descending.

    An n-gram is dropped only when every one of its tokens is in `stopset`.
    Ties break lexicographically. `k=None` returns the full ranking.
    """
    counts: Counter[str] = Counter()
    for seq in texts:
        for gram in ngrams(seq, n):
            counts[gram] += 1
    kept = [
        (gram, c)
        for gram, c in counts.items()
        if not all(tok in stopset for tok in gram.split(" "))
    ]
    kept.sort(key=lambda item: (-item[1], item[0]))
    return kept if k is None else kept[:k]


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read a one-word-per-line stopword file (blank lines ignored)."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.strip().lower()
        if word:
            words.add(word)
    return frozenset(words)
