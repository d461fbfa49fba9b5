"""Regularized incomplete gamma/beta functions and the CDFs built on them.

Series expansions where they converge fast, modified-Lentz continued
fractions elsewhere (the conventional x < a+1 and x < (a+1)/(a+b+2)
switch points). Target accuracy 1e-10 absolute on the tested domain;
the iteration tolerances below leave a wide margin.
"""

from __future__ import annotations

import math

from adlens.errors import NumericError

_EPS = 1e-15
_FPMIN = 1e-300
_MAX_ITER = 500


def _check_df(name: str, value: float) -> None:
    if not (value > 0 and math.isfinite(value)):
        raise NumericError(f"{name} must be a positive finite number, got {value!r}")


def gammainc_lower(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    _check_df("a", a)
    if x < 0:
        raise NumericError(f"x must be nonnegative, got {x!r}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_contfrac(a, x)


def gammainc_upper(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    _check_df("a", a)
    if x < 0:
        raise NumericError(f"x must be nonnegative, got {x!r}")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_contfrac(a, x)


def _gamma_prefactor(a: float, x: float) -> float:
    return math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_series(a: float, x: float) -> float:
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * _gamma_prefactor(a, x)
    raise NumericError(f"incomplete gamma series failed to converge (a={a}, x={x})")


def _gamma_contfrac(a: float, x: float) -> float:
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h * _gamma_prefactor(a, x)
    raise NumericError(f"incomplete gamma fraction failed to converge (a={a}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    _check_df("a", a)
    _check_df("b", b)
    if not 0.0 <= x <= 1.0:
        raise NumericError(f"x must lie in [0, 1], got {x!r}")
    if x == 0.0 or x == 1.0:
        return x
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def _betacf(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise NumericError(f"incomplete beta fraction failed to converge (a={a}, b={b}, x={x})")


def chi2_cdf(x: float, k: float) -> float:
    """P(X <= x) for chi-square with k degrees of freedom."""
    _check_df("k", k)
    if x <= 0.0:
        return 0.0
    return gammainc_lower(k / 2.0, x / 2.0)


def chi2_sf(x: float, k: float) -> float:
    """P(X > x), computed via Q(a, x) directly to avoid 1-cdf cancellation."""
    _check_df("k", k)
    if x <= 0.0:
        return 1.0
    return gammainc_upper(k / 2.0, x / 2.0)


def t_cdf(x: float, nu: float) -> float:
    """P(T <= x) for Student's t with nu degrees of freedom (nu may be fractional)."""
    _check_df("nu", nu)
    if x == 0.0:
        return 0.5
    tail = 0.5 * betainc(nu / 2.0, 0.5, nu / (nu + x * x))
    return tail if x < 0.0 else 1.0 - tail


def t_sf(x: float, nu: float) -> float:
    """P(T > x); exact symmetry with t_cdf(-x, nu)."""
    return t_cdf(-x, nu)


def f_cdf(x: float, d1: float, d2: float) -> float:
    """P(F <= x) for the F distribution with (d1, d2) degrees of freedom."""
    _check_df("d1", d1)
    _check_df("d2", d2)
    if x <= 0.0:
        return 0.0
    return betainc(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2))


def f_sf(x: float, d1: float, d2: float) -> float:
    """P(F > x) via the beta symmetry I_x(a,b) = 1 - I_{1-x}(b,a)."""
    _check_df("d1", d1)
    _check_df("d2", d2)
    if x <= 0.0:
        return 1.0
    return betainc(d2 / 2.0, d1 / 2.0, d2 / (d1 * x + d2))
