"""
Weekly time-series types and the elementary transforms shared by the engine.

Weeks are identified by the Friday of their ISO (Monday-start) week. A value
keyed by week t is known at the end of week t; decisions taken at week t
trade the holding window of week t + 1.
"""

import logging
from bisect import bisect_left
from dataclasses import dataclass, field
from datetime import timedelta

import numpy as np
import pandas as pd

from .exceptions import SeriesError

logger = logging.getLogger(__name__)

WEEK = timedelta(days=7)

MONDAY, TUESDAY, WEDNESDAY, THURSDAY, FRIDAY = range(5)

WEEKDAYS = {
    "monday": MONDAY,
    "tuesday": TUESDAY,
    "wednesday": WEDNESDAY,
    "thursday": THURSDAY,
    "friday": FRIDAY,
}


def week_key(day):
    """
    Returns the week identifier (Friday of the ISO week) of a calendar date.

    Saturday and Sunday belong to the week that started on the preceding
    Monday, so a Google Trends week ending on a Saturday maps onto the
    Friday just before it.
    """
    if isinstance(day, pd.Timestamp):
        day = day.date()
    return day + timedelta(days=FRIDAY - day.weekday())


def _as_dates(index):
    return tuple(pd.Timestamp(value).date() for value in index)


def _frozen(values):
    array = np.array(values, dtype=np.float64)
    array.setflags(write=False)
    return array


# ---------------------------- Series Types ----------------------------


@dataclass(frozen=True, eq=False)
class WeeklySeries:
    """
    Ordered weekly observations of one real-valued quantity (SVI, return, position).

    Attributes:
    label (str): Name of the quantity, usually a keyword or a ticker.
    weeks (tuple): Week identifiers (datetime.date), strictly increasing, on the Friday grid.
    values (numpy.ndarray): Finite values, read-only.
    gaps (tuple): Weeks inside the span that were dropped at construction (holiday weeks).
    """

    label: str
    weeks: tuple
    values: np.ndarray
    gaps: tuple = field(default=())

    def __post_init__(self):
        weeks = tuple(self.weeks)
        values = _frozen(self.values)
        if values.ndim != 1 or len(weeks) != len(values):
            raise SeriesError("weeks and values differ in length", label=self.label)
        if not np.all(np.isfinite(values)):
            raise SeriesError("non-finite value", label=self.label)
        for previous, current in zip(weeks, weeks[1:]):
            step = (current - previous).days
            if step <= 0 or step % 7:
                raise SeriesError(
                    "irregular spacing", label=self.label, week=current.isoformat()
                )
        object.__setattr__(self, "weeks", weeks)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "gaps", tuple(self.gaps))

    def __len__(self):
        return len(self.weeks)

    @property
    def is_contiguous(self):
        return all(b - a == WEEK for a, b in zip(self.weeks, self.weeks[1:]))

    def to_series(self):
        """Returns the series as a pandas Series indexed by week."""
        return pd.Series(
            np.array(self.values),
            index=pd.DatetimeIndex(self.weeks, name="week_end"),
            name=self.label,
        )

    @classmethod
    def from_series(cls, label, series, gaps=()):
        """Builds a WeeklySeries from a pandas Series indexed by week."""
        return cls(label, _as_dates(series.index), series.to_numpy(), gaps)

    def value_at(self, week):
        """Returns the value at a week, or None when the week is absent."""
        position = bisect_left(self.weeks, week)
        if position < len(self.weeks) and self.weeks[position] == week:
            return float(self.values[position])
        return None

    def truncate(self, last_week):
        """Returns the observations up to and including last_week."""
        keep = [i for i, week in enumerate(self.weeks) if week <= last_week]
        return WeeklySeries(
            self.label,
            tuple(self.weeks[i] for i in keep),
            self.values[keep],
            tuple(gap for gap in self.gaps if gap <= last_week),
        )

    def scaled(self, a, b=0.0):
        """Returns the affine image a * values + b (used by invariance checks)."""
        return WeeklySeries(self.label, self.weeks, a * self.values + b, self.gaps)


@dataclass(frozen=True, eq=False)
class DailyPriceSeries:
    """
    Daily closing prices of one asset.

    Attributes:
    asset (str): Ticker label.
    dates (tuple): Trading dates, strictly increasing.
    closes (numpy.ndarray): Strictly positive closing prices.
    """

    asset: str
    dates: tuple
    closes: np.ndarray

    def __post_init__(self):
        dates = tuple(self.dates)
        closes = _frozen(self.closes)
        if not dates:
            raise SeriesError("empty series", asset=self.asset)
        if len(dates) != len(closes):
            raise SeriesError("dates and closes differ in length", asset=self.asset)
        if not np.all(np.isfinite(closes)) or np.any(closes <= 0):
            raise SeriesError("invalid price", asset=self.asset)
        if any(b <= a for a, b in zip(dates, dates[1:])):
            raise SeriesError("dates not strictly increasing", asset=self.asset)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "closes", closes)

    def to_series(self):
        return pd.Series(
            np.array(self.closes),
            index=pd.DatetimeIndex(self.dates, name="date"),
            name="close",
        )


# ---------------------------- Weekly Returns ----------------------------


def _resolved_closes(closes, weekdays, weeks, day):
    """Last close at or before `day` inside each week (holiday rule)."""
    mask = weekdays <= day
    return closes[mask].groupby(weeks[mask]).last()


def weekly_return(prices, entry_day=MONDAY, exit_day=FRIDAY):
    """
    Computes one holding-window return per calendar week.

    The return of week w is close(exit) / close(entry) - 1. Entry and exit
    resolve to the last close at or before the requested weekday within the
    week. When entry_day == exit_day the exit is taken one week later (full
    week mode, Monday close to next Monday close). Weeks without a tradable
    entry or exit are omitted and listed in the result's `gaps`.

    Parameters:
    prices (DailyPriceSeries): Daily closes of one asset.
    entry_day (int): Weekday of the entry close (0 = Monday).
    exit_day (int): Weekday of the exit close.

    Returns:
    WeeklySeries: Weekly returns labelled with the asset name.
    """
    if prices is None or not len(prices.dates):
        raise SeriesError("empty series")
    if not (MONDAY <= entry_day <= FRIDAY and MONDAY <= exit_day <= FRIDAY):
        raise SeriesError("weekday out of range", entry_day=entry_day, exit_day=exit_day)
    if exit_day < entry_day:
        raise SeriesError(
            "exit day precedes entry day", entry_day=entry_day, exit_day=exit_day
        )

    closes = prices.to_series()
    weekdays = closes.index.weekday
    weeks = closes.index + pd.to_timedelta(FRIDAY - weekdays, unit="D")

    entry = _resolved_closes(closes, weekdays, weeks, entry_day)
    exit_ = _resolved_closes(closes, weekdays, weeks, exit_day)
    if exit_day == entry_day:
        exit_.index = exit_.index - pd.Timedelta(days=7)

    returns = (exit_ / entry - 1.0).dropna()
    # full week mode has no exit for the last week of the price history
    last = weeks.max() - pd.Timedelta(days=7) if exit_day == entry_day else weeks.max()
    calendar = pd.date_range(weeks.min(), last, freq="7D")
    gaps = calendar.difference(returns.index)
    if len(gaps):
        logger.warning(
            "%s: %d week(s) without tradable entry/exit close dropped",
            prices.asset,
            len(gaps),
        )
    return WeeklySeries.from_series(prices.asset, returns, gaps=_as_dates(gaps))


# ---------------------------- Rolling Statistics ----------------------------


def _require_window(s, k):
    if k < 1:
        raise SeriesError("window must be a positive integer", k=k)
    if k > len(s):
        raise SeriesError("insufficient history", label=s.label, k=k, length=len(s))
    if not s.is_contiguous:
        raise SeriesError("irregular spacing", label=s.label)


def past_windows(values, k):
    """
    Returns the strictly-past windows of length k.

    Row j holds values[j : j + k], i.e. the k observations preceding
    position j + k.
    """
    return np.lib.stride_tricks.sliding_window_view(np.asarray(values), k)


def _rolling(s, k, reducer, suffix):
    _require_window(s, k)
    windows = past_windows(s.values, k)
    first = s.weeks[k - 1] + WEEK
    weeks = tuple(first + i * WEEK for i in range(len(windows)))
    return WeeklySeries(f"{s.label}{suffix}", weeks, reducer(windows, axis=1))


def rolling_mean(s, k):
    """
    Trailing simple moving average over weeks t-1 ... t-k (current week excluded).

    The first k weeks have no output. The last output sits one week after
    the last input, since it only needs past values.
    """
    return _rolling(s, k, np.mean, f"_ma{k}")


def rolling_median(s, k):
    """Trailing median over weeks t-1 ... t-k; even windows use the midpoint of the central pair."""
    return _rolling(s, k, np.median, f"_med{k}")


def align(a, b):
    """
    Restricts two weekly series to their common weeks.

    Returns:
    tuple: (a restricted, b restricted), same weeks in the same order.
    """
    common = sorted(set(a.weeks) & set(b.weeks))
    if not common:
        raise SeriesError("disjoint spans", left=a.label, right=b.label)

    def restrict(s):
        index = {week: i for i, week in enumerate(s.weeks)}
        rows = [index[week] for week in common]
        return WeeklySeries(s.label, tuple(common), s.values[rows], s.gaps)

    return restrict(a), restrict(b)
