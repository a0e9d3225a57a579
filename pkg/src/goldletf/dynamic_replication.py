"""Daily-rebalanced constant-leverage futures portfolio.

The portfolio keeps ``beta`` times its value in one futures contract and
funds the remainder in the money market:

    P[j+1] = P[j] * (1 + beta * (F[j+1]/F[j] - 1) - (beta - 1) * r[j] * dt)

Under a diffusion for ``F`` the continuous-time log value is

    log P_t = log P_0 + beta * log(F_t/F_0) + (beta - beta**2)/2 * Sigma_t + (1 - beta) * R_t

with ``Sigma_t`` the realized variance and ``R_t`` the integrated rate.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import RuinError, as_float_array, as_price_array, check_beta, check_positive
from .market_data import DT, PriceSeries, RateSeries, align
from .metrics import tracking_report as _metrics_tracking_report


@dataclass(frozen=True)
class VarianceLedger:
    """Running realized variance and integrated rate, both zero at the start."""

    realized_variance: np.ndarray
    integrated_rate: np.ndarray


@dataclass(frozen=True)
class LeveredPortfolioPath:
    values: PriceSeries
    beta: float
    futures: PriceSeries = None
    rates: RateSeries = None

    def __len__(self):
        return len(self.values)


def _rate_array(rates, n):
    if rates is None:
        return np.zeros(n)
    if np.isscalar(rates):
        return np.full(n, float(rates))
    r = as_float_array(rates, "rates")
    if r.size != n:
        raise ValueError(f"rates have {r.size} points, futures have {n}")
    return r


def _resolve(futures, rates):
    if isinstance(futures, PriceSeries) and isinstance(rates, RateSeries):
        futures, rates = align([futures, rates])
    return futures, rates


def simulate(futures, rates=None, beta=2.0, initial=1000.0, dt=DT):
    """Euler-discretized portfolio path; the rate fixed on day ``j`` funds day ``j`` to ``j+1``.

    Parameters
    ----------
    futures : PriceSeries or array-like
        Continuous (roll-spliced) futures levels.
    rates : RateSeries, array-like, float or None
        Annualized simple rates; ``None`` means zero.
    beta : float
    initial : float
        Starting portfolio value.
    dt : float
        Year fraction per step.

    Raises
    ------
    RuinError
        When a one-day growth factor is non-positive.
    """
    beta = check_beta(beta)
    initial = check_positive(initial, "initial")
    futures, rates = _resolve(futures, rates)
    f = as_price_array(futures, "futures", min_length=1)
    r = _rate_array(rates, f.size)
    growth = 1.0 + beta * (f[1:] / f[:-1] - 1.0) - (beta - 1.0) * r[:-1] * dt
    dates = getattr(futures, "dates", None)
    if np.any(growth <= 0):
        j = int(np.flatnonzero(growth <= 0)[0])
        when = f"on {dates[j + 1]}" if dates is not None else f"at step {j + 1}"
        raise RuinError(f"portfolio ruined {when} (growth factor {growth[j]:.6g})",
                        date=None if dates is None else dates[j + 1], index=j + 1)
    values = initial * np.concatenate(([1.0], np.cumprod(growth)))
    if dates is None:
        return values
    return LeveredPortfolioPath(PriceSeries(dates, values, f"portfolio_{beta:g}x"), beta,
                                futures, rates if isinstance(rates, RateSeries) else None)


def realized_variance(futures):
    """Cumulative sum of squared daily log-returns, starting at 0."""
    f = as_price_array(futures, "futures", min_length=2)
    lr = np.diff(np.log(f))
    return np.concatenate(([0.0], np.cumsum(lr * lr)))


def variance_ledger(futures, rates=None, dt=DT):
    f = as_price_array(futures, "futures", min_length=2)
    r = _rate_array(rates, f.size)
    return VarianceLedger(realized_variance(f), np.concatenate(([0.0], np.cumsum(r[:-1] * dt))))


def logprice_prediction(futures, rates=None, beta=2.0, initial=1000.0, dt=DT):
    """Closed-form portfolio values from the log-price decomposition."""
    beta = check_beta(beta)
    initial = check_positive(initial, "initial")
    futures, rates = _resolve(futures, rates)
    f = as_price_array(futures, "futures", min_length=2)
    ledger = variance_ledger(f, rates, dt)
    log_p = (np.log(initial) + beta * np.log(f / f[0])
             + 0.5 * (beta - beta * beta) * ledger.realized_variance
             + (1.0 - beta) * ledger.integrated_rate)
    values = np.exp(log_p)
    dates = getattr(futures, "dates", None)
    if dates is None:
        return values
    return PriceSeries(dates, values, f"logprice_{beta:g}x")


def tracking_report(portfolio, benchmark, capital=1000.0):
    """RMSE and per-year returns of ``portfolio`` against ``benchmark`` on their common dates.

    Both paths are expected to start at ``capital``; they are compared as levels.
    """
    if isinstance(portfolio, LeveredPortfolioPath):
        portfolio = portfolio.values
    if hasattr(portfolio, "dates") and hasattr(benchmark, "dates"):
        try:
            portfolio, benchmark = align([portfolio, benchmark])
        except ValueError as exc:
            raise ValueError("portfolio and benchmark have no dates in common") from exc
    elif len(portfolio) == 0 or len(benchmark) == 0:
        raise ValueError("empty overlap")
    return _metrics_tracking_report(portfolio, benchmark, capital=capital)


class DynamicLeverageReplicator(TransformerMixin, BaseEstimator):
    """Transformer mapping a futures path (and optional rates) to the levered portfolio.

    ``transform(X, rates=None)`` where ``X`` is a 1-D futures path or a
    two-column array ``[futures, rate]``.
    """

    def __init__(self, beta=2.0, initial=1000.0, dt=DT):
        self.beta = beta
        self.initial = initial
        self.dt = dt

    def fit(self, X=None, y=None):
        check_beta(self.beta)
        check_positive(self.initial, "initial")
        check_positive(self.dt, "dt")
        return self

    def _split(self, X, rates):
        if rates is None and not hasattr(X, "dates"):
            arr = np.asarray(X, dtype=float)
            if arr.ndim == 2 and arr.shape[1] == 2:
                return arr[:, 0], arr[:, 1]
        return X, rates

    def transform(self, X, rates=None):
        futures, rates = self._split(X, rates)
        out = simulate(futures, rates, self.beta, self.initial, self.dt)
        return out.values if isinstance(out, LeveredPortfolioPath) else out

    def predict_logprice(self, X, rates=None):
        futures, rates = self._split(X, rates)
        return logprice_prediction(futures, rates, self.beta, self.initial, self.dt)
