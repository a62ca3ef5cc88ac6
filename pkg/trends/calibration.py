"""
Null-keyword calibration: run the moving-average rule on keywords with no
plausible link to the traded asset and measure how often the t-stat crosses a
significance threshold by chance.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import StatsError
from .parallel import ordered_map
from .strategies import preis_tstat

logger = logging.getLogger(__name__)

MIN_KEYWORDS = 20


@dataclass(frozen=True)
class CalibrationReport:
    """
    T-stats of one keyword set against one asset.

    Attributes:
    tstats (tuple): (keyword, tstat) pairs in input order.
    threshold (float): Absolute t-stat counted as an exceedance.
    exceed_fraction (float): Share of keywords with |t| > threshold.
    """

    tstats: tuple
    threshold: float
    exceed_fraction: float

    @property
    def standard_error(self):
        """Binomial standard error of the exceed fraction under its own estimate."""
        p = self.exceed_fraction
        return float(np.sqrt(p * (1 - p) / len(self.tstats)))

    def best(self, count=3):
        """Highest t-stats, best first."""
        return sorted(self.tstats, key=lambda item: item[1], reverse=True)[:count]

    def worst(self, count=3):
        """Lowest t-stats, worst first."""
        return sorted(self.tstats, key=lambda item: item[1])[:count]

    def summary(self):
        return {
            "n_keywords": len(self.tstats),
            "threshold": self.threshold,
            "exceed_fraction": self.exceed_fraction,
            "standard_error": self.standard_error,
            "best": [{"keyword": k, "tstat": t} for k, t in self.best()],
            "worst": [{"keyword": k, "tstat": t} for k, t in self.worst()],
        }

    def histogram(self, bins=20):
        """Counts of t-stats per bin as (bin_left, bin_right, count) rows."""
        counts, edges = np.histogram([t for _, t in self.tstats], bins=bins)
        return [
            (float(left), float(right), int(count))
            for left, right, count in zip(edges[:-1], edges[1:], counts)
        ]


def null_calibration(
    keyword_series, asset_returns, k=10, cost_bps=2.0, threshold=1.96, threads=1
):
    """
    Backtests the moving-average rule once per keyword and counts significant t-stats.

    Parameters:
    keyword_series (list): WeeklySeries of SVI, labelled by keyword.
    asset_returns (WeeklySeries): Holding-window returns of the traded asset.
    k (int): Moving average length.
    cost_bps (float): Transaction cost per unit of turnover.
    threshold (float): Absolute t-stat counted as an exceedance.
    threads (int): Worker threads; results do not depend on it.

    Returns:
    CalibrationReport: All t-stats and the exceed fraction.
    """
    keyword_series = list(keyword_series)
    if len(keyword_series) < MIN_KEYWORDS:
        raise StatsError(
            "too few keyword series", count=len(keyword_series), required=MIN_KEYWORDS
        )
    tstats = ordered_map(
        lambda svi: preis_tstat(svi, asset_returns, k, cost_bps), keyword_series, threads
    )
    pairs = tuple((svi.label, float(t)) for svi, t in zip(keyword_series, tstats))
    exceed = float(np.mean([abs(t) > threshold for _, t in pairs]))
    logger.info(
        "%s: %d keyword(s), %.3f exceed |t| > %.2f",
        asset_returns.label,
        len(pairs),
        exceed,
        threshold,
    )
    return CalibrationReport(pairs, float(threshold), exceed)
