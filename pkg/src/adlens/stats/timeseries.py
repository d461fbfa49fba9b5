"""Daily time series, OLS, and the two-directional Granger causality F-test."""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field

import numpy as np

from adlens.errors import EmptySeriesError, SingularDesignError
from adlens.stats.core import TestResult
from adlens.stats.special import f_sf

_ONE_DAY = dt.timedelta(days=1)


@dataclass
class TimeSeries:
    """Gap-free daily series: `values[i]` belongs to `dates[i]`."""

    dates: list[dt.date]
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if len(self.dates) != self.values.size:
            raise ValueError("dates and values must have the same length")
        if len(self.dates) == 0:
            raise EmptySeriesError("time series is empty")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if cur - prev != _ONE_DAY:
                raise ValueError(f"dates must be consecutive days, gap at {cur}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("time-series values must be finite")

    def __len__(self) -> int:
        return len(self.dates)

    def as_dict(self) -> dict:
        return {
            "start": self.dates[0].isoformat(),
            "values": self.values.tolist(),
        }


def align(a: TimeSeries, b: TimeSeries) -> tuple[TimeSeries, TimeSeries]:
    """Restrict two daily series to their common date span."""
    start = max(a.dates[0], b.dates[0])
    stop = min(a.dates[-1], b.dates[-1])
    if start > stop:
        raise EmptySeriesError("series have no overlapping dates")

    def cut(s: TimeSeries) -> TimeSeries:
        i = (start - s.dates[0]).days
        j = (stop - s.dates[0]).days + 1
        return TimeSeries(dates=s.dates[i:j], values=s.values[i:j])

    return cut(a), cut(b)


def ols_fit(y: np.ndarray, X: np.ndarray) -> tuple[np.ndarray, float]:
    """Least squares via QR; returns (coefficients, residual sum of squares)."""
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.size:
        raise ValueError("need y of shape (n,) and X of shape (n, p)")
    n, p = X.shape
    if n <= p:
        raise SingularDesignError(f"need more rows than columns, got {n}x{p}")
    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    tol = max(n, p) * np.finfo(float).eps * (diag.max() if diag.size else 0.0)
    if diag.size == 0 or np.any(diag <= tol):
        raise SingularDesignError("design matrix is rank deficient")
    beta = np.linalg.solve(r, q.T @ y)
    resid = y - X @ beta
    return beta, float(resid @ resid)


@dataclass
class GrangerLagResult:
    """Outcome for one lag: `result` is set only when status == 'ok'."""

    lag: int
    status: str  # ok | skipped | singular
    result: TestResult | None = None
    note: str = ""

    def as_dict(self) -> dict:
        out: dict = {"lag": self.lag, "status": self.status}
        if self.result is not None:
            out.update(self.result.as_dict())
        if self.note:
            out["note"] = self.note
        return out


def _lagged_design(z: np.ndarray, lag: int, t0: int) -> np.ndarray:
    """Columns z[t-1], ..., z[t-lag] for t = t0..n-1."""
    return np.column_stack([z[t0 - j : len(z) - j] for j in range(1, lag + 1)])


def granger_test(x: TimeSeries, y: TimeSeries, max_lag: int) -> list[GrangerLagResult]:
    """Does x Granger-cause y? One sum-of-squares F-test per lag 1..max_lag.

    Restricted model regresses y_t on an intercept and its own L lags; the
    unrestricted model adds L lags of x. F = ((RSS_r - RSS_u)/L) /
    (RSS_u/(n - 2L - 1)) with n the usable observations for that lag.
    """
    if max_lag < 1:
        raise ValueError(f"max_lag must be >= 1, got {max_lag}")
    if x.dates[0] != y.dates[0] or len(x) != len(y):
        raise ValueError("series must share the same date axis (use align())")
    xv, yv = x.values, y.values
    n_total = len(yv)
    results: list[GrangerLagResult] = []
    for lag in range(1, max_lag + 1):
        n_used = n_total - lag
        dfd = n_used - (2 * lag + 1)
        if dfd < 1:
            results.append(
                GrangerLagResult(
                    lag=lag,
                    status="skipped",
                    note=f"series too short: {n_used} usable rows for {2 * lag + 1} parameters",
                )
            )
            continue
        target = yv[lag:]
        ones = np.ones((n_used, 1))
        y_lags = _lagged_design(yv, lag, lag)
        x_lags = _lagged_design(xv, lag, lag)
        try:
            _, rss_r = ols_fit(target, np.hstack([ones, y_lags]))
            _, rss_u = ols_fit(target, np.hstack([ones, y_lags, x_lags]))
        except SingularDesignError as exc:
            results.append(GrangerLagResult(lag=lag, status="singular", note=str(exc)))
            continue
        if rss_u <= max(rss_r, 1.0) * 1e-14:
            # Unrestricted fit is numerically exact: evidence is unbounded.
            results.append(
                GrangerLagResult(
                    lag=lag,
                    status="ok",
                    result=TestResult(math.inf, (float(lag), float(dfd)), 0.0),
                    note="unrestricted residual is numerically zero",
                )
            )
            continue
        f = ((rss_r - rss_u) / lag) / (rss_u / dfd)
        f = max(f, 0.0)
        results.append(
            GrangerLagResult(
                lag=lag,
                status="ok",
                result=TestResult(f, (float(lag), float(dfd)), f_sf(f, lag, dfd)),
            )
        )
    return results
