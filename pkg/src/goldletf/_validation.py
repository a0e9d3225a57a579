"""Input validation helpers shared by the estimators and functional API."""

import math

import numpy as np

BETA_BOUND = 10.0


class RuinError(ValueError):
    """A leveraged compounding factor hit zero or went negative."""

    def __init__(self, message, date=None, index=None):
        super().__init__(message)
        self.date = date
        self.index = index


def check_beta(beta):
    beta = float(beta)
    if not math.isfinite(beta) or abs(beta) > BETA_BOUND:
        raise ValueError(f"leverage ratio must be finite and within [-{BETA_BOUND:g}, {BETA_BOUND:g}], got {beta!r}")
    return beta


def check_positive(value, name):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return value


def as_price_array(values, name="prices", min_length=1):
    """Coerce to a 1-D float array of strictly positive finite prices."""
    arr = np.asarray(getattr(values, "values", values), dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_length:
        raise ValueError(f"{name} needs at least {min_length} points, got {arr.size}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValueError(f"{name} must be strictly positive and finite")
    return arr


def as_float_array(values, name="values", min_length=1):
    arr = np.asarray(getattr(values, "values", values), dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_length:
        raise ValueError(f"{name} needs at least {min_length} points, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def check_same_length(a, b, names=("a", "b")):
    if len(a) != len(b):
        raise ValueError(f"{names[0]} and {names[1]} are misaligned: lengths {len(a)} and {len(b)}")


def check_same_calendar(*series):
    """Raise if labelled series (anything with ``.dates``) disagree on dates."""
    dated = [s for s in series if hasattr(s, "dates")]
    for s in dated[1:]:
        if len(s.dates) != len(dated[0].dates) or not np.array_equal(s.dates, dated[0].dates):
            raise ValueError("series are not aligned on a common calendar; call align() first")
