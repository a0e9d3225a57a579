"""Daily price and rate series on a trading calendar: ingest, align, persist.

Dates are held as ``numpy.datetime64[D]`` arrays. Series objects are frozen;
every operation returns a new object.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ._validation import check_positive

TRADING_DAYS_PER_YEAR = 252
DT = 1.0 / TRADING_DAYS_PER_YEAR


class IngestError(ValueError):
    """Raised for malformed CSV input. ``problems`` lists every bad row."""

    def __init__(self, message, problems=()):
        self.problems = list(problems)
        if self.problems:
            message = message + ":\n  " + "\n  ".join(self.problems)
        super().__init__(message)


def _as_dates(dates):
    arr = np.asarray(dates, dtype="datetime64[D]")
    if arr.ndim != 1:
        raise ValueError("dates must be one-dimensional")
    return arr


@dataclass(frozen=True)
class TradingCalendar:
    """Strictly increasing sequence of business dates."""

    dates: np.ndarray

    def __post_init__(self):
        dates = _as_dates(self.dates)
        if dates.size == 0:
            raise ValueError("trading calendar must be non-empty")
        if dates.size > 1 and not np.all(dates[1:] > dates[:-1]):
            raise ValueError("trading calendar dates must be strictly increasing")
        dates.setflags(write=False)
        object.__setattr__(self, "dates", dates)

    def __len__(self):
        return self.dates.size

    def __iter__(self):
        return iter(self.dates)

    def __eq__(self, other):
        return isinstance(other, TradingCalendar) and np.array_equal(self.dates, other.dates)

    __hash__ = None

    @classmethod
    def business_days(cls, start, periods=None, end=None):
        """Mon-Fri calendar (no holiday table) from ``start``."""
        idx = pd.bdate_range(start=start, end=end, periods=periods)
        return cls(idx.values.astype("datetime64[D]"))

    def years(self):
        return self.dates.astype("datetime64[Y]").astype(int) + 1970


@dataclass(frozen=True)
class _Series:
    dates: np.ndarray
    values: np.ndarray
    name: str = field(default="value")

    def __post_init__(self):
        if isinstance(self.dates, TradingCalendar):
            dates = self.dates.dates
        else:
            dates = TradingCalendar(self.dates).dates
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size != dates.size:
            raise ValueError(f"{self.name}: need exactly one value per calendar day "
                             f"({dates.size} dates, {values.size} values)")
        self._check_values(values)
        values.setflags(write=False)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)

    def _check_values(self, values):
        if not np.all(np.isfinite(values)):
            raise ValueError(f"{self.name}: values must be finite")

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        return (type(self) is type(other) and self.name == other.name
                and np.array_equal(self.dates, other.dates)
                and np.array_equal(self.values, other.values))

    __hash__ = None

    @property
    def calendar(self):
        return TradingCalendar(self.dates)

    def restrict(self, dates):
        """Subset to ``dates`` (must all be present)."""
        dates = _as_dates(dates)
        pos = np.searchsorted(self.dates, dates)
        if np.any(pos >= self.dates.size) or not np.array_equal(self.dates[np.minimum(pos, self.dates.size - 1)], dates):
            raise KeyError(f"{self.name}: requested dates not all present")
        return type(self)(dates, self.values[pos], self.name)

    def between(self, start=None, end=None):
        """Inclusive date-range slice."""
        mask = np.ones(self.dates.size, dtype=bool)
        if start is not None:
            mask &= self.dates >= np.datetime64(start, "D")
        if end is not None:
            mask &= self.dates <= np.datetime64(end, "D")
        if not mask.any():
            raise ValueError(f"{self.name}: no observations between {start} and {end}")
        return type(self)(self.dates[mask], self.values[mask], self.name)

    def with_values(self, values, name=None):
        return type(self)(self.dates, values, self.name if name is None else name)

    def to_pandas(self):
        return pd.Series(self.values, index=pd.DatetimeIndex(self.dates), name=self.name)

    def to_csv(self, path_or_buf=None):
        """Write ``date,<name>`` CSV with round-trip exact (repr) floats."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["date", self.name])
        for d, v in zip(self.dates, self.values):
            writer.writerow([str(d), repr(float(v))])
        text = buf.getvalue()
        if path_or_buf is None:
            return text
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return None


class PriceSeries(_Series):
    """Strictly positive price or index level per trading day."""

    def _check_values(self, values):
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            bad = np.flatnonzero(~np.isfinite(values) | (values <= 0))
            raise ValueError(f"{self.name}: prices must be strictly positive and finite "
                             f"(first bad index {int(bad[0])})")


class RateSeries(_Series):
    """Annualized simple interest rate per trading day, decimal per year."""


def ingest_csv(source, date_column="date", value_column=None, kind="price", name=None):
    """Parse a ``date,<value>`` CSV into a :class:`PriceSeries` or :class:`RateSeries`.

    Parameters
    ----------
    source : str, path-like, bytes or file object
        CSV text. Lines beginning with ``#`` are treated as comments.
    date_column, value_column : str
        Column mapping. ``value_column`` defaults to the first non-date column.
    kind : {"price", "rate"}

    Rows are re-sorted ascending by date. Every invalid row is reported with
    its 1-based data-row number in a single :class:`IngestError`.
    """
    if kind not in ("price", "rate"):
        raise ValueError(f"kind must be 'price' or 'rate', got {kind!r}")
    text = _read_text(source)
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise IngestError("empty file")
    reader = csv.reader(lines)
    header = [h.strip() for h in next(reader)]
    if date_column not in header:
        raise IngestError(f"malformed header {header!r}: no {date_column!r} column")
    if value_column is None:
        others = [h for h in header if h != date_column]
        if not others:
            raise IngestError(f"malformed header {header!r}: no value column")
        value_column = others[0]
    if value_column not in header:
        raise IngestError(f"malformed header {header!r}: no {value_column!r} column")
    di, vi = header.index(date_column), header.index(value_column)

    dates, values, problems = [], [], []
    seen = {}
    for rowno, row in enumerate(reader, start=1):
        if len(row) != len(header):
            problems.append(f"row {rowno}: expected {len(header)} fields, got {len(row)}")
            continue
        try:
            d = np.datetime64(row[di].strip(), "D")
            if str(d) != row[di].strip():
                raise ValueError
        except ValueError:
            problems.append(f"row {rowno}: unparseable date {row[di]!r}")
            continue
        try:
            v = float(row[vi])
        except ValueError:
            problems.append(f"row {rowno}: unparseable value {row[vi]!r}")
            continue
        if not np.isfinite(v):
            problems.append(f"row {rowno}: non-finite value {row[vi]!r}")
            continue
        if kind == "price" and v <= 0:
            problems.append(f"row {rowno}: non-positive price {v!r}")
            continue
        if d in seen:
            problems.append(f"row {rowno}: duplicate date {d} (first seen in row {seen[d]})")
            continue
        seen[d] = rowno
        dates.append(d)
        values.append(v)
    if problems:
        raise IngestError(f"{len(problems)} invalid row(s) in {value_column!r}", problems)
    if not dates:
        raise IngestError("empty file: header only")
    dates = np.array(dates, dtype="datetime64[D]")
    values = np.array(values)
    order = np.argsort(dates, kind="stable")
    cls = PriceSeries if kind == "price" else RateSeries
    return cls(dates[order], values[order], name or value_column)


def _read_text(source):
    if hasattr(source, "read"):
        data = source.read()
    elif isinstance(source, bytes):
        data = source
    elif isinstance(source, str) and ("\n" in source or not source):
        data = source
    else:
        with open(source, "rb") as fh:
            data = fh.read()
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise IngestError(f"input is not UTF-8 text: {exc}") from None
    return data


def align(series):
    """Restrict every series to the intersection of their calendars."""
    series = list(series)
    if not series:
        raise ValueError("align needs at least one series")
    common = series[0].dates
    for s in series[1:]:
        common = np.intersect1d(common, s.dates, assume_unique=True)
    if common.size == 0:
        raise ValueError("empty calendar intersection")
    return [s if np.array_equal(s.dates, common) else s.restrict(common) for s in series]


def money_market_series(rates, initial=1000.0, dt=DT, name="money_market"):
    """Money-market account accrued at simple interest, one step per trading day.

    ``M[0] = initial`` and ``M[j+1] = M[j] * (1 + r[j] * dt)``.
    """
    initial = check_positive(initial, "initial")
    r = np.asarray(rates.values, dtype=float)
    growth = 1.0 + r[:-1] * dt
    if np.any(growth <= 0):
        j = int(np.flatnonzero(growth <= 0)[0])
        raise ValueError(f"rate {r[j]!r} on {rates.dates[j]} makes the accrual factor non-positive")
    values = initial * np.concatenate(([1.0], np.cumprod(growth)))
    return PriceSeries(rates.dates, values, name)


def constant_rates(calendar, rate=0.0, name="rate"):
    dates = calendar.dates if isinstance(calendar, TradingCalendar) else _as_dates(calendar)
    return RateSeries(dates, np.full(dates.size, float(rate)), name)
