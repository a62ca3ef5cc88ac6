"""
Performance statistics and the rank-sum comparison of return samples.

All statistics use the zero-interest convention (no risk-free subtraction)
and 52 weeks per year.
"""

from dataclasses import asdict, dataclass
from itertools import combinations

import numpy as np
from scipy.stats import norm, rankdata

from .exceptions import StatsError

WEEKS_PER_YEAR = 52

BPS = 1e4

# |a| + |b| up to this size is tested by full enumeration
EXACT_LIMIT = 12


@dataclass(frozen=True)
class PerfStats:
    """
    Summary of a weekly return series.

    tstat and ir_annualized are None when the volatility is zero.
    """

    n_weeks: int
    mean_weekly_bps: float
    vol_weekly_bps: float
    tstat: float | None = None
    ir_annualized: float | None = None

    def as_dict(self):
        return asdict(self)


def _values(weekly_returns):
    values = getattr(weekly_returns, "values", weekly_returns)
    return np.asarray(values, dtype=np.float64)


def perf_stats(weekly_returns):
    """
    Mean, sample volatility (n - 1 denominator), t-stat and annualised information ratio.

    tstat = mean / vol * sqrt(n) and ir = mean / vol * sqrt(52).

    Parameters:
    weekly_returns (WeeklySeries | array-like): Weekly returns in return units.

    Returns:
    PerfStats: Mean and volatility are reported in basis points.
    """
    values = _values(weekly_returns)
    n = len(values)
    if n < 2:
        raise StatsError("at least two weekly returns required", n_weeks=n)
    mean = float(np.mean(values))
    if np.all(values == values[0]):
        vol = 0.0
    else:
        vol = float(np.std(values, ddof=1))
    if vol == 0.0:
        return PerfStats(n, mean * BPS, 0.0)
    ratio = mean / vol
    return PerfStats(
        n_weeks=n,
        mean_weekly_bps=mean * BPS,
        vol_weekly_bps=vol * BPS,
        tstat=ratio * np.sqrt(n),
        ir_annualized=ratio * np.sqrt(WEEKS_PER_YEAR),
    )


# ---------------------------- Rank Sum Test ----------------------------


def _exact_pvalue(ranks, n1, observed, expected):
    sums = np.array([ranks[list(chosen)].sum() for chosen in combinations(range(len(ranks)), n1)])
    extreme = np.abs(sums - expected) >= abs(observed - expected) - 1e-9
    return float(extreme.mean())


def _normal_pvalue(pooled, n1, observed, expected):
    n = len(pooled)
    n2 = n - n1
    _, ties = np.unique(pooled, return_counts=True)
    tie_term = float((ties**3 - ties).sum()) / (n * (n - 1)) if n > 1 else 0.0
    variance = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if variance <= 0:
        return 1.0
    z = max(abs(observed - expected) - 0.5, 0.0) / np.sqrt(variance)
    return float(2.0 * norm.sf(z))


def wilcoxon_ranksum(a, b, method="auto"):
    """
    Two-sided Wilcoxon rank-sum (Mann-Whitney) p-value.

    Ties get midranks. With method "auto" samples totalling at most
    EXACT_LIMIT observations are tested by enumerating every assignment of
    ranks to the first sample; larger ones use the normal approximation
    with tie and continuity corrections.

    Parameters:
    a, b (array-like): The two samples.
    method (str): "auto", "exact" or "normal".

    Returns:
    float: p-value in [0, 1].
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if not len(a) or not len(b):
        raise StatsError("empty sample")
    if method not in ("auto", "exact", "normal"):
        raise StatsError("unknown rank-sum method", method=method)

    pooled = np.concatenate([a, b])
    ranks = rankdata(pooled, method="average")
    n1 = len(a)
    observed = float(ranks[:n1].sum())
    expected = n1 * (len(pooled) + 1) / 2.0

    if method == "exact" or (method == "auto" and len(pooled) <= EXACT_LIMIT):
        p = _exact_pvalue(ranks, n1, observed, expected)
    else:
        p = _normal_pvalue(pooled, n1, observed, expected)
    return min(1.0, max(0.0, p))
