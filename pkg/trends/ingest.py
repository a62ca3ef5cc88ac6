"""
Parsing of Google-Trends-style SVI exports and price files, bundled keyword
sets, and reconstruction of one consistently scaled SVI series from
overlapping max-normalised export windows.
"""

import io
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from django.conf import settings

from .exceptions import IngestError, SeriesError
from .series import WEEK, DailyPriceSeries, WeeklySeries, week_key

logger = logging.getLogger(__name__)

SVI_MAX = 100

DEFAULT_MIN_OVERLAP = 8

BUNDLED_KEYWORD_SETS = ("ailments", "classic_cars", "arcade_games", "preis_finance")


# ---------------------------- Domain Types ----------------------------


@dataclass(frozen=True, eq=False)
class RawSviWindow:
    """
    One integer-normalised 0-100 export covering a contiguous range of weeks.

    Attributes:
    keyword (str): Search keyword of the export.
    weeks (tuple): Week identifiers, 7 days apart.
    values (tuple): Integer SVI values in [0, 100].
    has_peak (bool): Whether the window reaches 100. A window without a peak
        may be a sub-export; it is accepted with a warning.
    """

    keyword: str
    weeks: tuple
    values: tuple
    has_peak: bool = field(init=False)

    def __post_init__(self):
        if not self.weeks or len(self.weeks) != len(self.values):
            raise IngestError("empty or ragged SVI window", keyword=self.keyword)
        if any(b - a != WEEK for a, b in zip(self.weeks, self.weeks[1:])):
            raise IngestError("irregular spacing", keyword=self.keyword)
        if any(v < 0 or v > SVI_MAX for v in self.values):
            raise IngestError("out-of-range SVI", keyword=self.keyword)
        object.__setattr__(self, "has_peak", SVI_MAX in self.values)

    @property
    def start(self):
        return self.weeks[0]

    @property
    def end(self):
        return self.weeks[-1]

    def as_array(self):
        return np.array(self.values, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class StitchedSvi:
    """
    SVI series joined from overlapping windows, defined up to a global positive scale.

    Attributes:
    keyword (str): Search keyword.
    series (WeeklySeries): Non-negative stitched values in the units of the first window.
    windows_used (int): Number of windows joined.
    overlap_fit_error (float): Root-mean-square relative mismatch of the scaled overlaps.
    scales (tuple): Scale factor applied to each window, the first one being 1.
    """

    keyword: str
    series: WeeklySeries
    windows_used: int
    overlap_fit_error: float
    scales: tuple = ()


@dataclass(frozen=True)
class KeywordSet:
    name: str
    keywords: tuple

    def __post_init__(self):
        if not self.keywords:
            raise IngestError("empty keyword set", name=self.name)
        if len(set(self.keywords)) != len(self.keywords):
            raise IngestError("duplicate keywords", name=self.name)

    def __iter__(self):
        return iter(self.keywords)

    def __len__(self):
        return len(self.keywords)


# ---------------------------- CSV Parsing ----------------------------


def _read_csv(data, columns):
    if isinstance(data, (str, Path)):
        data = Path(data).read_bytes()
    try:
        frame = pd.read_csv(io.BytesIO(data), dtype=str, skipinitialspace=True)
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise IngestError("unreadable CSV", reason=str(exc)) from exc
    frame.columns = [str(column).strip().lower() for column in frame.columns]
    missing = [column for column in columns if column not in frame.columns]
    if missing:
        raise IngestError("missing CSV columns", missing=missing)
    return frame[list(columns)].dropna(how="all")


def _parse_dates(column):
    try:
        return pd.to_datetime(column.str.strip(), format="ISO8601")
    except (ValueError, TypeError) as exc:
        raise IngestError("invalid date", reason=str(exc)) from exc


def _svi_value(text):
    text = str(text).strip()
    # Google Trends writes "<1" for nonzero interest that rounds to zero
    if text == "<1":
        return 0
    try:
        number = float(text)
    except ValueError as exc:
        raise IngestError("invalid SVI value", value=text) from exc
    if not np.isfinite(number) or number != int(number):
        raise IngestError("invalid SVI value", value=text)
    return int(number)


def parse_svi_csv(data, keyword=""):
    """
    Parses one SVI export with header `week_end,value`.

    Parameters:
    data (bytes | str | Path): UTF-8 CSV content or a path to it.
    keyword (str): Keyword the export belongs to.

    Returns:
    RawSviWindow: The validated window. Dates are mapped onto the Friday week grid.
    """
    frame = _read_csv(data, ("week_end", "value"))
    dates = _parse_dates(frame["week_end"])
    steps = dates.diff().dropna()
    if (steps != pd.Timedelta(days=7)).any():
        raise IngestError("irregular spacing", keyword=keyword)
    weeks = tuple(week_key(day) for day in dates)
    window = RawSviWindow(keyword, weeks, tuple(_svi_value(v) for v in frame["value"]))
    if not window.has_peak:
        logger.warning("%s: SVI window %s..%s has no 100 peak", keyword, window.start, window.end)
    return window


def parse_price_csv(data, asset=""):
    """Parses a daily price file with header `date,close`; extra columns are ignored."""
    frame = _read_csv(data, ("date", "close"))
    if frame.empty:
        raise SeriesError("empty series", asset=asset)
    dates = _parse_dates(frame["date"])
    try:
        closes = frame["close"].astype(float).to_numpy()
    except ValueError as exc:
        raise SeriesError("invalid price", asset=asset) from exc
    return DailyPriceSeries(asset, tuple(day.date() for day in dates), closes)


# ---------------------------- Keyword Sets ----------------------------


def load_keyword_set(name):
    """
    Loads a bundled keyword set or a user keyword file (one keyword per line).

    Bundled lists are kept exactly as published, repeats included; repeated
    keywords are removed here, in order, with a warning.

    Parameters:
    name (str): One of BUNDLED_KEYWORD_SETS or a path to a text file.

    Returns:
    KeywordSet: The keywords, in file order.
    """
    if name in BUNDLED_KEYWORD_SETS:
        path = Path(settings.TRENDS["KEYWORD_DIR"]) / f"{name}.txt"
        set_name = name
    else:
        path = Path(name)
        set_name = path.stem or "user"
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestError("unknown keyword set", name=name) from exc

    keywords = []
    for line in lines:
        keyword = line.strip()
        if not keyword:
            continue
        if keyword in keywords:
            logger.warning("%s: repeated keyword %r ignored", set_name, keyword)
            continue
        keywords.append(keyword)
    if not keywords:
        raise IngestError("empty keyword set", name=name)
    return KeywordSet(set_name, tuple(keywords))


# ---------------------------- Stitching ----------------------------


def _overlap(left, right):
    """Positions of the common weeks in both windows."""
    start = right.start
    if start > left.end:
        return np.array([], dtype=int), np.array([], dtype=int)
    offset = (start - left.start).days // 7
    count = min(len(left.weeks) - offset, len(right.weeks))
    return np.arange(offset, offset + count), np.arange(count)


def stitch_windows(windows, min_overlap=DEFAULT_MIN_OVERLAP):
    """
    Joins overlapping SVI windows into one consistently scaled series.

    Windows are chained in start order. The scale of window i+1 minimises
    sum((a_i w_i - a_{i+1} w_{i+1})^2) over the overlap weeks where both
    exports are >= 1, which gives a_{i+1} = a_i sum(w_i w_{i+1}) / sum(w_{i+1}^2).
    Weeks covered by several windows average the rescaled values with
    weights 1 / a_i^2 (the rounding step of a window in common units is a_i).

    Parameters:
    windows (list): RawSviWindow instances of one keyword.
    min_overlap (int): Minimum number of common weeks between consecutive windows.

    Returns:
    StitchedSvi: The joined series in the units of the first window.
    """
    if not windows:
        raise IngestError("no SVI windows")
    keywords = {window.keyword for window in windows}
    if len(keywords) > 1:
        raise IngestError("windows for different keywords", keywords=sorted(keywords))
    keyword = windows[0].keyword
    ordered = sorted(windows, key=lambda window: (window.start, window.end))

    scales = [1.0]
    mismatches = []
    for left, right in zip(ordered, ordered[1:]):
        left_rows, right_rows = _overlap(left, right)
        if len(left_rows) < min_overlap:
            raise IngestError(
                "insufficient overlap",
                keyword=keyword,
                weeks=int(len(left_rows)),
                required=min_overlap,
            )
        x = left.as_array()[left_rows]
        y = right.as_array()[right_rows]
        usable = (x >= 1) & (y >= 1)
        if not usable.any():
            raise IngestError("degenerate overlap", keyword=keyword, start=right.start.isoformat())
        x, y = x[usable], y[usable]
        scale = scales[-1] * float(np.dot(x, y) / np.dot(y, y))
        scales.append(scale)
        scaled_left, scaled_right = scales[-2] * x, scale * y
        mismatches.append((scaled_left - scaled_right) / ((scaled_left + scaled_right) / 2))

    start = ordered[0].start
    length = max((window.end - start).days // 7 + 1 for window in ordered)
    weighted = np.zeros(length)
    weights = np.zeros(length)
    for window, scale in zip(ordered, scales):
        offset = (window.start - start).days // 7
        rows = slice(offset, offset + len(window.weeks))
        # weight 1 / a^2 on the rescaled values a * w
        weighted[rows] += window.as_array() / scale
        weights[rows] += 1.0 / scale**2
    if np.any(weights == 0):
        raise IngestError("windows leave uncovered weeks", keyword=keyword)

    values = weighted / weights
    fit_error = float(np.sqrt(np.mean(np.concatenate(mismatches) ** 2))) if mismatches else 0.0
    weeks = tuple(start + i * WEEK for i in range(length))
    logger.info("%s: stitched %d window(s), fit error %.4f", keyword, len(ordered), fit_error)
    return StitchedSvi(
        keyword=keyword,
        series=WeeklySeries(keyword, weeks, values),
        windows_used=len(ordered),
        overlap_fit_error=fit_error,
        scales=tuple(scales),
    )
