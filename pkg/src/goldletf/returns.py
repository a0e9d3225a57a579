"""Simple returns over disjoint holding periods."""

from dataclasses import dataclass

import numpy as np

from ._validation import as_price_array


@dataclass(frozen=True)
class ReturnSeries:
    """Simple returns over consecutive, non-overlapping ``h``-day windows.

    ``start_dates`` holds the first date of each window (``None`` when the
    input was an unlabelled array).
    """

    h: int
    values: np.ndarray
    start_dates: np.ndarray = None

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def simple_returns(prices, h=1):
    """Windows are anchored at the first observation; a short tail is dropped.

    >>> simple_returns([100, 102, 99, 105, 103], h=2).values.round(6)
    array([-0.01    ,  0.040404])
    """
    if int(h) != h or h < 1:
        raise ValueError(f"holding period must be a positive integer, got {h!r}")
    h = int(h)
    p = as_price_array(prices, "prices")
    if p.size < h + 1:
        raise ValueError(f"series too short: {p.size} points for holding period {h}")
    m = (p.size - 1) // h
    ends = p[h:h * m + 1:h]
    starts = p[0:h * (m - 1) + 1:h]
    dates = getattr(prices, "dates", None)
    start_dates = None if dates is None else dates[0:h * (m - 1) + 1:h]
    return ReturnSeries(h, ends / starts - 1.0, start_dates)


def log_returns(prices):
    p = as_price_array(prices, "prices", min_length=2)
    return np.diff(np.log(p))
