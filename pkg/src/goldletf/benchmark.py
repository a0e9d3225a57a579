"""Leveraged benchmark: ``L_n = L_0 * prod(1 + beta * R_j)`` over daily returns."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import RuinError, as_float_array, as_price_array, check_beta, check_positive
from .market_data import PriceSeries


def _compounding_factors(returns, beta, dates=None):
    factors = 1.0 + beta * returns
    if np.any(factors <= 0):
        j = int(np.flatnonzero(factors <= 0)[0])
        when = f" on {dates[j + 1]}" if dates is not None else f" at step {j + 1}"
        raise RuinError(f"ruin{when}: 1 + beta*R = {factors[j]:.6g} with beta={beta:g}, R={returns[j]:.6g}",
                        date=None if dates is None else dates[j + 1], index=j + 1)
    return factors


def leveraged_benchmark(underlying, beta, initial=None):
    """Daily-rebalanced ``beta``-times benchmark of a price path.

    Parameters
    ----------
    underlying : PriceSeries or array-like
    beta : float
        Leverage ratio in [-10, 10].
    initial : float, optional
        Starting level; defaults to the underlying's first value.

    Returns
    -------
    PriceSeries when given a PriceSeries, else ndarray.

    Raises
    ------
    RuinError
        If any ``1 + beta * R_j <= 0``.
    """
    beta = check_beta(beta)
    g = as_price_array(underlying, "underlying")
    initial = g[0] if initial is None else check_positive(initial, "initial")
    dates = getattr(underlying, "dates", None)
    r = g[1:] / g[:-1] - 1.0
    factors = _compounding_factors(r, beta, dates)
    values = initial * np.concatenate(([1.0], np.cumprod(factors)))
    if dates is None:
        return values
    return PriceSeries(dates, values, f"benchmark_{beta:g}x")


def leverage_sensitivity(returns, beta):
    """Derivative of ``log(L_n / L_0)`` with respect to beta: ``sum R/(1 + beta R)``."""
    beta = check_beta(beta)
    r = as_float_array(returns, "returns", min_length=0)
    factors = _compounding_factors(r, beta)
    return float(np.sum(r / factors))


class LeveragedBenchmark(TransformerMixin, BaseEstimator):
    """Transformer wrapping :func:`leveraged_benchmark`.

    Stateless: ``fit`` only validates parameters. ``transform`` maps a price
    path (1-D, or a single column) to its leveraged benchmark.
    """

    def __init__(self, beta=2.0, initial=None):
        self.beta = beta
        self.initial = initial

    def fit(self, X=None, y=None):
        check_beta(self.beta)
        if self.initial is not None:
            check_positive(self.initial, "initial")
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        return leveraged_benchmark(X, self.beta, self.initial)
