"""
Portfolio ledger: turns per-asset position series into weekly returns net of
transaction costs, with exposures and the cumulated performance.
"""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .exceptions import LedgerError
from .series import WEEK, WeeklySeries

logger = logging.getLogger(__name__)

BPS = 1e4

LEDGER_COLUMNS = (
    "gross_return",
    "cost",
    "net_return",
    "net_exposure",
    "gross_exposure",
    "n_stocks",
    "cumulated",
)


@dataclass(frozen=True, eq=False)
class BacktestLedger:
    """
    Weekly portfolio ledger keyed by realization week.

    Row w describes the holding window of week w, i.e. the positions decided
    at week w - 7 days. Rows are contiguous weeks; a week without any
    position is a flat row.

    Attributes:
    frame (pandas.DataFrame): LEDGER_COLUMNS indexed by `week_end`.
    cost_bps (float): Transaction cost per unit of turnover, in basis points.
    """

    frame: pd.DataFrame
    cost_bps: float = 0.0

    def __len__(self):
        return len(self.frame)

    @property
    def weeks(self):
        return tuple(day.date() for day in self.frame.index)

    def column(self, name, label=None):
        return WeeklySeries.from_series(label or name, self.frame[name])

    def net_returns(self):
        return self.column("net_return")

    def to_csv(self, path):
        frame = self.frame.copy()
        frame.index = frame.index.strftime("%Y-%m-%d")
        frame.to_csv(path, index_label="week_end", lineterminator="\n")


def _empty_ledger(cost_bps):
    frame = pd.DataFrame(
        {column: pd.Series(dtype=np.float64) for column in LEDGER_COLUMNS},
        index=pd.DatetimeIndex([], name="week_end"),
    )
    frame["n_stocks"] = frame["n_stocks"].astype(np.int64)
    return BacktestLedger(frame, cost_bps)


def priced_positions(positions, returns):
    """
    Drops decision weeks whose holding week has no return.

    Weeks lost to the holiday rule of weekly_return become flat weeks in the
    ledger instead of unpriced positions.
    """
    priced = {week - WEEK for week in returns.weeks}
    return positions.restrict(priced)


def run_backtest(positions, returns, cost_bps):
    """
    Builds the portfolio ledger of equally weighted active positions.

    The weight of asset a at decision week t is position_a(t) / N(t), with N(t)
    the number of assets holding a nonzero position that week. The week's
    gross return is sum_a w_a(t) r_a(t + 1); every unit of turnover
    |w_a(t) - w_a(t - 1)| pays cost_bps / 10^4, starting from zero weights.

    Parameters:
    positions (dict): asset -> PositionSeries.
    returns (dict): asset -> WeeklySeries of holding-window returns.
    cost_bps (float): Transaction cost per unit of turnover, in basis points.

    Returns:
    BacktestLedger: One row per decision week, keyed by realization week.
    """
    if cost_bps < 0:
        raise LedgerError("negative transaction cost", cost_bps=cost_bps)
    assets = sorted(positions)
    for asset in assets:
        if asset not in returns:
            raise LedgerError("unpriced position", asset=asset)
    if not assets or not any(len(positions[asset]) for asset in assets):
        return _empty_ledger(cost_bps)

    raw = pd.DataFrame({asset: positions[asset].to_series() for asset in assets})
    # one row per calendar week; weeks missing from every asset are flat
    grid = pd.date_range(raw.index.min(), raw.index.max(), freq="7D")
    raw = raw.reindex(grid).fillna(0.0)[assets]
    active = (raw != 0.0).sum(axis=1)
    weights = raw.div(active.where(active > 0), axis=0).fillna(0.0)

    realized = raw.index + pd.Timedelta(days=7)
    asset_returns = pd.DataFrame(
        {asset: returns[asset].to_series().reindex(realized).to_numpy() for asset in assets},
        index=raw.index,
    )[assets]
    unpriced = (weights != 0.0) & asset_returns.isna()
    if unpriced.to_numpy().any():
        week, asset = unpriced.stack().loc[lambda flags: flags].index[0]
        raise LedgerError(
            "unpriced position", asset=asset, week=(week + pd.Timedelta(days=7)).date().isoformat()
        )

    gross = (weights * asset_returns.fillna(0.0)).sum(axis=1)
    previous = weights.shift(1, fill_value=0.0)
    turnover = (weights - previous).abs().sum(axis=1)
    cost = (cost_bps / BPS) * turnover
    net = gross - cost

    frame = pd.DataFrame(
        {
            "gross_return": gross.to_numpy(),
            "cost": cost.to_numpy(),
            "net_return": net.to_numpy(),
            "net_exposure": weights.sum(axis=1).to_numpy(),
            "gross_exposure": weights.abs().sum(axis=1).to_numpy(),
            "n_stocks": active.to_numpy().astype(np.int64),
            "cumulated": net.cumsum().to_numpy(),
        },
        index=pd.DatetimeIndex(realized, name="week_end"),
    )
    logger.debug("ledger: %d week(s), %d asset(s)", len(frame), len(assets))
    return BacktestLedger(frame, cost_bps)


def equity_curve(ledger):
    """Cumulated net returns by week (arithmetic sum)."""
    return WeeklySeries.from_series("equity", ledger.frame["cumulated"])
