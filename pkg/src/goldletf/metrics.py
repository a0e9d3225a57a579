"""Tracking-error and performance metrics shared by every report."""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_float_array, as_price_array, check_same_calendar, check_same_length


def sse(a, b):
    """Sum of squared level gaps between two aligned series."""
    check_same_calendar(a, b)
    x = as_float_array(a, "a")
    y = as_float_array(b, "b")
    check_same_length(x, y)
    gap = x - y
    return float(np.dot(gap, gap))


def rmse(a, b):
    n = len(as_float_array(a, "a"))
    return math.sqrt(sse(a, b) / n)


def cumulative_returns(series):
    p = as_price_array(series, "series")
    return p / p[0] - 1.0


def annual_returns(series, dates=None):
    """Map calendar year -> last/first - 1 using observations inside that year.

    Years with fewer than two observations are omitted.
    """
    p = as_price_array(series, "series")
    if dates is None:
        dates = series.dates
    years = np.asarray(dates, dtype="datetime64[Y]").astype(int) + 1970
    if years.size != p.size:
        raise ValueError("dates and values differ in length")
    out = {}
    for year in np.unique(years):
        idx = np.flatnonzero(years == year)
        if idx.size >= 2:
            out[int(year)] = float(p[idx[-1]] / p[idx[0]] - 1.0)
    return out


@dataclass
class TrackingReport:
    """Error of a portfolio path against its target.

    ``sse`` and ``rmse`` are in the units of the inputs; when ``per_1000`` is
    set both series were scaled to start at 1000.
    """

    sse: float
    rmse: float
    n: int
    annual: dict = field(default_factory=dict)
    cumulative: np.ndarray = None
    per_1000: bool = True

    def to_dict(self):
        return {
            "sse": self.sse,
            "rmse": self.rmse,
            "annual": {str(k): v for k, v in sorted(self.annual.items())},
            "per_1000": self.per_1000,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)


def tracking_report(portfolio, target, capital=1000.0, normalize=False):
    """SSE/RMSE of ``portfolio`` against ``target`` plus the portfolio's annual returns.

    Levels are compared as given; with ``normalize`` both series are first
    rescaled to start at ``capital``.
    """
    p = as_price_array(portfolio, "portfolio")
    t = as_price_array(target, "target")
    check_same_calendar(portfolio, target)
    check_same_length(p, t, ("portfolio", "target"))
    if normalize:
        p = capital * p / p[0]
        t = capital * t / t[0]
    s = sse(p, t)
    dates = getattr(portfolio, "dates", None)
    annual = annual_returns(p, dates) if dates is not None else {}
    return TrackingReport(sse=s, rmse=math.sqrt(s / p.size), n=p.size, annual=annual,
                          cumulative=p / p[0] - 1.0,
                          per_1000=bool(capital == 1000 and (normalize or p[0] == t[0] == 1000)))
