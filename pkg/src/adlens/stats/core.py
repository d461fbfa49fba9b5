"""Pearson correlation, chi-square contingency test, Welch t-test, Cohen's kappa."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from adlens.errors import NumericError, UndefinedStatisticError
from adlens.stats.special import chi2_sf, t_cdf, t_sf


@dataclass(frozen=True)
class TestResult:
    statistic: float
    df: float | tuple[float, float]
    p_value: float

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise NumericError(f"p-value out of [0, 1]: {self.p_value!r}")

    def as_dict(self) -> dict:
        df = list(self.df) if isinstance(self.df, tuple) else self.df
        return {"statistic": self.statistic, "df": df, "p_value": self.p_value}


@dataclass
class ContingencyTable:
    counts: np.ndarray
    row_labels: list[str]
    col_labels: list[str]

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=float)
        if self.counts.ndim != 2:
            raise ValueError("contingency table must be two-dimensional")
        r, c = self.counts.shape
        if r < 2 or c < 2:
            raise ValueError(f"contingency table needs >= 2 rows and columns, got {r}x{c}")
        if len(self.row_labels) != r or len(self.col_labels) != c:
            raise ValueError("label lengths do not match table shape")
        if np.any(self.counts < 0) or not np.all(np.isfinite(self.counts)):
            raise ValueError("contingency counts must be finite and nonnegative")

    def as_dict(self) -> dict:
        return {
            "rows": self.row_labels,
            "cols": self.col_labels,
            "counts": self.counts.tolist(),
        }


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient of two equal-length sequences."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ValueError("x and y must be one-dimensional and the same length")
    if xa.size < 2:
        raise UndefinedStatisticError("pearson needs at least 2 observations")
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedStatisticError("pearson undefined for a constant input")
    r = float(dx @ dy) / np.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, r)))


def chi_square_test(table: ContingencyTable) -> TestResult:
    """Pearson chi-square test of independence on a two-way table."""
    counts = table.counts
    row_sums = counts.sum(axis=1)
    col_sums = counts.sum(axis=0)
    if np.any(row_sums == 0) or np.any(col_sums == 0):
        raise UndefinedStatisticError("contingency table has an all-zero row or column")
    total = counts.sum()
    expected = np.outer(row_sums, col_sums) / total
    stat = float(((counts - expected) ** 2 / expected).sum())
    df = (counts.shape[0] - 1) * (counts.shape[1] - 1)
    return TestResult(statistic=stat, df=float(df), p_value=chi2_sf(stat, df))


def t_test(
    a: Sequence[float],
    b: Sequence[float],
    alternative: str = "two-sided",
) -> TestResult:
    """Welch's two-sample t-test with Welch-Satterthwaite degrees of freedom.

    `alternative` is "two-sided", "greater" (mean(a) > mean(b)) or "less".
    The one-sided p equals half the two-sided p when the statistic's sign
    matches the alternative.
    """
    xa = np.asarray(a, dtype=float)
    xb = np.asarray(b, dtype=float)
    if xa.size < 2 or xb.size < 2:
        raise UndefinedStatisticError("t-test needs at least 2 observations per sample")
    na, nb = xa.size, xb.size
    va = float(xa.var(ddof=1))
    vb = float(xb.var(ddof=1))
    sa, sb = va / na, vb / nb
    if sa + sb == 0.0:
        raise UndefinedStatisticError("t-test undefined: zero variance in both samples")
    t = float((xa.mean() - xb.mean()) / np.sqrt(sa + sb))
    df = (sa + sb) ** 2 / (sa**2 / (na - 1) + sb**2 / (nb - 1))
    if alternative == "two-sided":
        p = 2.0 * t_sf(abs(t), df)
    elif alternative == "greater":
        p = t_sf(t, df)
    elif alternative == "less":
        p = t_cdf(t, df)
    else:
        raise ValueError(f"unknown alternative: {alternative!r}")
    return TestResult(statistic=t, df=df, p_value=min(p, 1.0))


def cohens_kappa(u: Sequence[str], v: Sequence[str]) -> float:
    """Chance-corrected agreement between two equal-length label sequences."""
    if len(u) != len(v):
        raise ValueError("label sequences must have the same length")
    n = len(u)
    if n < 1:
        raise UndefinedStatisticError("kappa needs at least 1 item")
    p_o = sum(1 for ui, vi in zip(u, v) if ui == vi) / n
    marg_u = Counter(u)
    marg_v = Counter(v)
    p_e = sum(marg_u[label] * marg_v.get(label, 0) for label in marg_u) / (n * n)
    if p_e == 1.0:
        raise UndefinedStatisticError(
            "kappa undefined: both annotators constant with identical labels"
        )
    return (p_o - p_e) / (1.0 - p_e)
