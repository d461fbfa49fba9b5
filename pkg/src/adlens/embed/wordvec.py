"""Pretrained word-vector table: frozen lookup, unknown tokens -> zero vector.

File format: one entry per line, token followed by `dim` decimal floats,
space-separated.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from adlens.errors import DataError


class WordVectors:
    def __init__(self, vocab: list[str], matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(vocab):
            raise ValueError("matrix rows must match vocab length")
        if not np.all(np.isfinite(matrix)):
            raise DataError("word vectors must be finite")
        self.vocab = list(vocab)
        self.matrix = matrix
        self.index = {tok: i for i, tok in enumerate(self.vocab)}
        if len(self.index) != len(self.vocab):
            raise DataError("duplicate token in word-vector table")

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.vocab)

    def rows(self, tokens: list[str]) -> np.ndarray:
        """(T, dim) matrix for a token sequence; unknown tokens are zero rows."""
        out = np.zeros((len(tokens), self.dim))
        for t, tok in enumerate(tokens):
            i = self.index.get(tok)
            if i is not None:
                out[t] = self.matrix[i]
        return out

    def mean_vector(self, tokens: list[str]) -> np.ndarray:
        """Mean input vector over the sequence (zeros for the empty sequence)."""
        if not tokens:
            return np.zeros(self.dim)
        return self.rows(tokens).mean(axis=0)

    @classmethod
    def load(cls, path: str | Path) -> "WordVectors":
        vocab: list[str] = []
        rows: list[list[float]] = []
        dim: int | None = None
        try:
            lines = Path(path).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise DataError(f"cannot read word vectors from {path}: {exc}") from exc
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            parts = line.rstrip().split(" ")
            if dim is None:
                dim = len(parts) - 1
                if dim < 1:
                    raise DataError(f"{path}:{lineno}: no vector components")
            if len(parts) != dim + 1:
                raise DataError(
                    f"{path}:{lineno}: expected {dim} components, got {len(parts) - 1}"
                )
            vocab.append(parts[0])
            try:
                rows.append([float(v) for v in parts[1:]])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: bad float: {exc}") from exc
        if not vocab:
            raise DataError(f"{path}: empty word-vector file")
        return cls(vocab, np.array(rows))

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for tok, row in zip(self.vocab, self.matrix):
                fh.write(tok + " " + " ".join(repr(float(v)) for v in row) + "\n")


def synthetic_vectors(vocab: list[str], dim: int, seed: int) -> WordVectors:
    """Deterministic stand-in vectors when no pretrained table is available.

    Each token's vector is drawn from a generator seeded by (seed, token
    digest), so a token keeps its vector across corpora and runs.
    """
    vocab = sorted(set(vocab))
    matrix = np.zeros((len(vocab), dim))
    for i, tok in enumerate(vocab):
        digest = hashlib.sha256(tok.encode("utf-8")).digest()
        token_seed = int.from_bytes(digest[:8], "little")
        rng = np.random.default_rng(np.random.SeedSequence([seed, token_seed]))
        matrix[i] = rng.normal(0.0, 1.0 / np.sqrt(dim), size=dim)
    return WordVectors(vocab, matrix)
