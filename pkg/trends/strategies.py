"""
Fixed-rule strategies: the moving-average SVI rule, scans over the moving
average length, and equal-weight averaging of positions.
"""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from . import backtest, stats
from .exceptions import StrategyError
from .parallel import ordered_map
from .series import past_windows, rolling_mean

logger = logging.getLogger(__name__)

# |delta| below this fraction of the window magnitude counts as a tie
TIE_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class PositionSeries:
    """
    Per-week weight of one asset, timestamped by decision week.

    A weight decided at week t applies to the holding window of week t + 1.

    Attributes:
    asset (str): Asset the weights apply to.
    weeks (tuple): Decision weeks, strictly increasing.
    weights (numpy.ndarray): Weights in [-1, +1].
    """

    asset: str
    weeks: tuple
    weights: np.ndarray

    def __post_init__(self):
        weeks = tuple(self.weeks)
        weights = np.array(self.weights, dtype=np.float64)
        weights.setflags(write=False)
        if weights.ndim != 1 or len(weeks) != len(weights):
            raise StrategyError("weeks and weights differ in length", asset=self.asset)
        if np.any(~np.isfinite(weights)) or np.any(np.abs(weights) > 1.0):
            raise StrategyError("weight outside [-1, +1]", asset=self.asset)
        if any(b <= a for a, b in zip(weeks, weeks[1:])):
            raise StrategyError("decision weeks not strictly increasing", asset=self.asset)
        object.__setattr__(self, "weeks", weeks)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return len(self.weeks)

    def to_series(self):
        return pd.Series(
            np.array(self.weights),
            index=pd.DatetimeIndex(self.weeks, name="week_end"),
            name=self.asset,
        )

    def restrict(self, weeks):
        """Keeps only the decision weeks contained in `weeks`."""
        keep = set(weeks)
        rows = [i for i, week in enumerate(self.weeks) if week in keep]
        return PositionSeries(
            self.asset, tuple(self.weeks[i] for i in rows), self.weights[rows]
        )


# ---------------------------- Moving Average Rule ----------------------------


def preis_signal(svi, k, asset=None):
    """
    Goes short when SVI exceeds its trailing k-week mean, long when below.

    delta(t) = svi(t) - mean(svi(t-1) ... svi(t-k)); weight(t) = -sign(delta(t)),
    and a tie (delta = 0) leaves the asset flat. Ties are detected relative to
    the window magnitude so that an affine rescaling of the SVI cannot turn a
    tie into a position.

    Parameters:
    svi (WeeklySeries): Contiguous SVI series.
    k (int): Length of the moving average.
    asset (str): Asset the positions trade; defaults to the SVI label.

    Returns:
    PositionSeries: Weights in {-1, 0, +1} from week k+1 on.
    """
    if k < 1 or len(svi) <= k:
        raise StrategyError("insufficient history", label=svi.label, k=k, length=len(svi))
    mean = rolling_mean(svi, k).values[:-1]
    current = svi.values[k:]
    delta = current - mean
    magnitude = np.maximum(np.abs(past_windows(svi.values, k)[:-1]).max(axis=1), np.abs(current))
    weights = np.where(np.abs(delta) <= TIE_TOLERANCE * magnitude, 0.0, -np.sign(delta))
    return PositionSeries(asset or svi.label, svi.weeks[k:], weights)


def preis_tstat(svi, asset_returns, k, cost_bps):
    """
    Backtests the moving-average rule on one asset and returns its t-stat.

    A flat strategy (zero volatility) or one with fewer than two priced weeks
    scores 0.
    """
    positions = preis_signal(svi, k, asset=asset_returns.label)
    positions = backtest.priced_positions(positions, asset_returns)
    ledger = backtest.run_backtest(
        {asset_returns.label: positions}, {asset_returns.label: asset_returns}, cost_bps
    )
    if len(ledger) < 2:
        return 0.0
    result = stats.perf_stats(ledger.net_returns())
    return result.tstat if result.tstat is not None else 0.0


def k_scan(svi, asset_returns, k_range, cost_bps, threads=1):
    """
    T-stat of the moving-average rule for every moving average length in k_range.

    Returns:
    list: (k, tstat) pairs ordered by k.
    """
    ks = sorted(set(int(k) for k in k_range))
    if not ks:
        raise StrategyError("empty k range")
    if ks[0] < 1 or ks[-1] >= len(svi):
        raise StrategyError(
            "k range exceeds available history", label=svi.label, k_max=ks[-1], length=len(svi)
        )
    tstats = ordered_map(
        lambda k: preis_tstat(svi, asset_returns, k, cost_bps), ks, threads
    )
    return list(zip(ks, tstats))


# ---------------------------- Ensembles ----------------------------


def ensemble_positions(signals):
    """
    Equal-weight mean of several position series of one asset.

    Only the weeks where every signal has a position are kept.
    """
    signals = list(signals)
    if not signals:
        raise StrategyError("empty signal list")
    assets = sorted({signal.asset for signal in signals})
    if len(assets) > 1:
        raise StrategyError("mixed assets", assets=assets)

    common = set(signals[0].weeks)
    for signal in signals[1:]:
        common &= set(signal.weeks)
    if not common:
        raise StrategyError("signals share no decision week", asset=assets[0])
    weeks = tuple(sorted(common))

    total = np.zeros(len(weeks))
    for signal in signals:
        total += signal.restrict(weeks).weights
    weights = np.clip(total / len(signals), -1.0, 1.0)
    return PositionSeries(assets[0], weeks, weights)
