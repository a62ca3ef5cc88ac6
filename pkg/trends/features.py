"""
Learner inputs built from past price returns and/or SVI changes, with the
optional reduction of every predictor to which side of its trailing median
it falls.
"""

import logging
import re
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .exceptions import FeatureError
from .series import past_windows

logger = logging.getLogger(__name__)

MODES = ("returns_only", "gt_only", "both")

DEFAULT_LAGS = 4

DEFAULT_MEDIAN_WINDOW = 26

LAG_PATTERN = re.compile(r"_lag(\d+)")


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """
    Rows of causal predictors, one per decision week, with the next holding-window return.

    Column names carry their lag (`ret_lag2`, `svi_lag1_bin`, ...).
    """

    asset: str
    weeks: tuple
    columns: tuple
    X: np.ndarray
    target: np.ndarray
    mode: str = "returns_only"
    lags: int = DEFAULT_LAGS
    binary: bool = False
    median_window: int = DEFAULT_MEDIAN_WINDOW

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64).reshape(len(self.weeks), len(self.columns))
        target = np.array(self.target, dtype=np.float64)
        if len(target) != len(self.weeks):
            raise FeatureError("target and rows differ in length", asset=self.asset)
        object.__setattr__(self, "weeks", tuple(self.weeks))
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "target", target)

    def __len__(self):
        return len(self.weeks)

    def lag_of(self, column):
        return int(LAG_PATTERN.search(column).group(1))

    def truncate(self, cut):
        """Rows whose decision week is strictly before `cut`."""
        rows = [i for i, week in enumerate(self.weeks) if week < cut]
        return self.select(rows)

    def select(self, rows):
        return FeatureMatrix(
            self.asset,
            tuple(self.weeks[i] for i in rows),
            self.columns,
            self.X[rows],
            self.target[rows],
            self.mode,
            self.lags,
            self.binary,
            self.median_window,
        )

    def to_frame(self):
        frame = pd.DataFrame(
            self.X, index=pd.DatetimeIndex(self.weeks, name="week_end"), columns=list(self.columns)
        )
        frame["target"] = self.target
        return frame

    def to_csv(self, path):
        """Writes `week_end`, one column per lagged feature, then `target`."""
        frame = self.to_frame()
        frame.index = frame.index.strftime("%Y-%m-%d")
        frame.to_csv(path, index_label="week_end", lineterminator="\n")


# ---------------------------- Transforms ----------------------------


def binarize(values, window):
    """
    1 where a value exceeds the median of the `window` values before it, else 0.

    A value counts as above the median when more than half of the trailing
    values lie strictly below it. Only order comparisons are involved, so the
    result is unchanged by any strictly increasing transform of the input.
    Positions without a complete finite history are NaN.
    """
    values = np.asarray(values, dtype=np.float64)
    out = np.full(len(values), np.nan)
    if len(values) <= window:
        return out
    windows = past_windows(values, window)[:-1]
    current = values[window:]
    below = (windows < current[:, None]).sum(axis=1)
    valid = np.isfinite(windows).all(axis=1) & np.isfinite(current)
    out[window:] = np.where(valid, (2 * below > window).astype(np.float64), np.nan)
    return out


def _svi_series(svi):
    return getattr(svi, "series", svi)


def _feature_frame(returns, svi, mode, lags, binary, median_window, end=None):
    """
    All feature columns on the weekly grid, before incomplete rows are dropped.

    Returns:
    tuple: (feature DataFrame, returns reindexed on the same grid)
    """
    needs_returns = mode in ("returns_only", "both")
    needs_svi = mode in ("gt_only", "both")
    ret = returns.to_series()
    inputs = [ret]
    if needs_svi:
        level = _svi_series(svi).to_series()
        inputs.append(level)
    start = min(series.index.min() for series in inputs if len(series))
    stop = max(series.index.max() for series in inputs if len(series))
    if end is not None:
        stop = max(stop, pd.Timestamp(end))
    grid = pd.date_range(start, stop, freq="7D", name="week_end")
    ret = ret.reindex(grid)

    columns = {}
    if needs_returns:
        for lag in range(1, lags + 1):
            columns[f"ret_lag{lag}"] = ret.shift(lag)
    if needs_svi:
        level = level.reindex(grid)
        change = (level / level.shift(1) - 1.0).replace([np.inf, -np.inf], np.nan)
        for lag in range(1, lags + 1):
            columns[f"svi_lag{lag}"] = change.shift(lag)
    frame = pd.DataFrame(columns, index=grid)
    if binary:
        frame = pd.DataFrame(
            {f"{name}_bin": binarize(frame[name].to_numpy(), median_window) for name in frame},
            index=grid,
        )
    return frame, ret


def _check_arguments(svi, mode, lags, binary, median_window):
    if mode not in MODES:
        raise FeatureError("unknown feature mode", mode=mode)
    if mode != "returns_only" and svi is None:
        raise FeatureError("feature mode requires SVI data", mode=mode)
    if lags < 1:
        raise FeatureError("lags must be at least 1", lags=lags)
    if binary and median_window < 2:
        raise FeatureError("median window must be at least 2", median_window=median_window)


def build_features(
    returns,
    svi=None,
    mode="both",
    lags=DEFAULT_LAGS,
    binary=False,
    median_window=DEFAULT_MEDIAN_WINDOW,
):
    """
    Builds the learner inputs of one asset.

    Return features are r(t - l) and SVI features s(t - l) / s(t - l - 1) - 1
    for l = 1 ... lags. With `binary`, every column is reduced to 1 / 0 by
    comparing it with its trailing `median_window`-week median. The target of
    row t is the holding-window return of week t + 1. Rows with any missing
    value are dropped.

    Parameters:
    returns (WeeklySeries): Holding-window returns of the asset.
    svi (StitchedSvi | WeeklySeries): SVI of the asset's keyword, or None.
    mode (str): "returns_only", "gt_only" or "both".
    lags (int): Number of lags per input.
    binary (bool): Reduce features to the side of their rolling median.
    median_window (int): Length of the rolling median window.

    Returns:
    FeatureMatrix: The complete rows, ordered by decision week.
    """
    _check_arguments(svi, mode, lags, binary, median_window)
    frame, ret = _feature_frame(returns, svi, mode, lags, binary, median_window)
    frame["target"] = ret.shift(-1)
    complete = frame.dropna()
    if complete.empty:
        raise FeatureError("insufficient history", asset=returns.label, mode=mode)
    columns = tuple(name for name in complete.columns if name != "target")
    logger.debug("%s: %d feature row(s), columns %s", returns.label, len(complete), columns)
    return FeatureMatrix(
        asset=returns.label,
        weeks=tuple(day.date() for day in complete.index),
        columns=columns,
        X=complete[list(columns)].to_numpy(),
        target=complete["target"].to_numpy(),
        mode=mode,
        lags=lags,
        binary=binary,
        median_window=median_window,
    )


# ---------------------------- Leakage Audit ----------------------------


@dataclass(frozen=True)
class LeakageViolation:
    week: object
    column: str
    value: float
    recomputed: float


@dataclass(frozen=True)
class LeakageReport:
    violations: tuple = field(default=())

    @property
    def ok(self):
        return not self.violations

    @property
    def flagged_columns(self):
        return sorted({violation.column for violation in self.violations})


def leakage_audit(fm, returns, svi=None):
    """
    Recomputes every feature cell from the raw inputs truncated at its decision week.

    A cell that differs, bit for bit, from the recomputed value depends on
    data after its decision week and is reported.

    Parameters:
    fm (FeatureMatrix): Matrix to audit.
    returns (WeeklySeries): Raw returns the matrix was built from.
    svi (StitchedSvi | WeeklySeries): Raw SVI, when the mode uses it.

    Returns:
    LeakageReport: Violations, empty for a causal matrix.
    """
    violations = []
    level = _svi_series(svi) if svi is not None else None
    for row, week in enumerate(fm.weeks):
        past_returns = returns.truncate(week)
        past_svi = level.truncate(week) if level is not None else None
        if not len(past_returns) and (past_svi is None or not len(past_svi)):
            recomputed = pd.Series(np.nan, index=fm.columns)
        else:
            frame, _ = _feature_frame(
                past_returns, past_svi, fm.mode, fm.lags, fm.binary, fm.median_window, end=week
            )
            stamp = pd.Timestamp(week)
            if stamp in frame.index:
                recomputed = frame.loc[stamp].reindex(list(fm.columns))
            else:
                recomputed = pd.Series(np.nan, index=fm.columns)
        for col, column in enumerate(fm.columns):
            value = fm.X[row, col]
            expected = recomputed[column]
            if not value == expected:
                violations.append(LeakageViolation(week, column, float(value), float(expected)))
    return LeakageReport(tuple(violations))
