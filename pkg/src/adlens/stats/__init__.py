"""Statistical toolbox: correlation, contingency tests, kappa, OLS, Granger.

The distribution functions are computed in-house (regularized incomplete
gamma/beta); scipy is deliberately not a runtime dependency so the test
suite can use it as an independent oracle.
"""

from adlens.stats.core import (
    ContingencyTable,
    TestResult,
    chi_square_test,
    cohens_kappa,
    pearson,
    t_test,
)
from adlens.stats.correlate import trigram_stance_correlation
from adlens.stats.special import chi2_cdf, chi2_sf, f_cdf, f_sf, t_cdf, t_sf
from adlens.stats.timeseries import GrangerLagResult, TimeSeries, granger_test, ols_fit

__all__ = [
    "ContingencyTable",
    "TestResult",
    "chi_square_test",
    "cohens_kappa",
    "pearson",
    "t_test",
    "trigram_stance_correlation",
    "chi2_cdf",
    "chi2_sf",
    "f_cdf",
    "f_sf",
    "t_cdf",
    "t_sf",
    "GrangerLagResult",
    "TimeSeries",
    "granger_test",
    "ols_fit",
]
