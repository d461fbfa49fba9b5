"""Trigram-vs-stance-group correlation matrices (the heatmap/table data)."""

from __future__ import annotations

from typing import Mapping, Protocol, Sequence

import numpy as np

from adlens.errors import UndefinedStatisticError
from adlens.stats.core import pearson
from adlens.textproc import TokenSeq


class AdEncoder(Protocol):
    def encode_tokens(self, tokens: Sequence[str]) -> np.ndarray: ...


def trigram_stance_correlation(
    trigrams: Sequence[str],
    stance_groups: Mapping[str, Sequence[TokenSeq]],
    model: AdEncoder,
) -> dict:
    """Pearson r between each trigram vector and each stance-group mean vector.

    A trigram is embedded by encoding its three tokens; a stance group by the
    mean of its ads' embeddings. The correlation runs over the embedding
    coordinates. Undefined entries (constant vectors) are recorded as None.
    """
    stances = list(stance_groups.keys())
    group_vectors = {}
    for stance in stances:
        ads = stance_groups[stance]
        if not ads:
            raise ValueError(f"stance group {stance!r} is empty")
        group_vectors[stance] = np.mean(
            [model.encode_tokens(tokens) for tokens in ads], axis=0
        )
    matrix: list[list[float | None]] = []
    for gram in trigrams:
        vec = model.encode_tokens(gram.split(" "))
        row: list[float | None] = []
        for stance in stances:
            try:
                row.append(pearson(vec, group_vectors[stance]))
            except UndefinedStatisticError:
                row.append(None)
        matrix.append(row)
    return {"trigrams": list(trigrams), "stances": stances, "matrix": matrix}
