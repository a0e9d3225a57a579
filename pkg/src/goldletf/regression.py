"""One-variable OLS with slope/intercept t-tests and the average return differential.

Student-t probabilities come from a regularized incomplete beta evaluated by
a modified-Lentz continued fraction, so nothing here depends on scipy.
"""

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_float_array, check_same_length

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAX_ITER = 500


def _betacf(a, b, x):
    # continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2)
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def regularized_incomplete_beta(a, b, x, one_minus_x=None):
    """``I_x(a, b)``. Pass ``one_minus_x`` when ``1 - x`` is known more precisely."""
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    y = 1.0 - x if one_minus_x is None else one_minus_x
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log(y))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, y) / b


def student_t_cdf(t, df):
    """Student-t distribution function with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError(f"degrees of freedom must be positive, got {df!r}")
    t = float(t)
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    if t == 0.0:
        return 0.5
    t2 = t * t
    denom = df + t2
    tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, df / denom, one_minus_x=t2 / denom)
    return tail if t < 0 else 1.0 - tail


def _two_sided_p(t, df):
    if math.isinf(t):
        return 0.0
    tail = student_t_cdf(-abs(t), df)
    return min(1.0, 2.0 * tail)


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r2: float
    rmse: float
    n: int
    sse: float
    sxx: float
    x_mean: float


@dataclass(frozen=True)
class HypothesisResult:
    t: float
    p_value: float
    df: int


def ols_fit(x, y):
    """Least-squares line ``y = intercept + slope * x``.

    ``rmse`` is ``sqrt(SSE / n)``. For a constant response R² is reported as 0.
    """
    x = as_float_array(x, "x", min_length=3)
    y = as_float_array(y, "y", min_length=3)
    check_same_length(x, y, ("x", "y"))
    n = x.size
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(np.dot(dx, dx))
    if sxx == 0.0 or sxx <= (np.finfo(float).eps * n * max(abs(xm), 1.0)) ** 2:
        raise ValueError("regressor is constant (Sxx = 0)")
    slope = float(np.dot(dx, dy) / sxx)
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    sse = float(np.dot(resid, resid))
    sst = float(np.dot(dy, dy))
    r2 = 0.0 if sst == 0.0 else min(1.0, max(0.0, 1.0 - sse / sst))
    return RegressionFit(slope=slope, intercept=intercept, r2=r2, rmse=math.sqrt(sse / n),
                         n=n, sse=sse, sxx=sxx, x_mean=float(xm))


def _t_test(estimate, null, se, df):
    if se == 0.0:
        if estimate == null:
            return HypothesisResult(0.0, 1.0, df)
        return HypothesisResult(math.copysign(math.inf, estimate - null), 0.0, df)
    t = (estimate - null) / se
    return HypothesisResult(t, _two_sided_p(t, df), df)


def slope_test(fit, beta0=0.0):
    """Two-sided t-test of ``slope == beta0``."""
    if fit.n < 3:
        raise ValueError("need n >= 3 for a slope test")
    df = fit.n - 2
    se = math.sqrt(fit.sse / df / fit.sxx)
    return _t_test(fit.slope, float(beta0), se, df)


def intercept_test(fit, null=0.0):
    """Two-sided t-test of ``intercept == null`` (zero by default)."""
    if fit.n < 3:
        raise ValueError("need n >= 3 for an intercept test")
    df = fit.n - 2
    se = math.sqrt(fit.sse / df * (1.0 / fit.n + fit.x_mean ** 2 / fit.sxx))
    return _t_test(fit.intercept, float(null), se, df)


def return_differential(letf, spot, beta):
    """Mean of ``R_letf - beta * R_spot`` over matched holding periods."""
    if hasattr(letf, "h") and hasattr(spot, "h") and letf.h != spot.h:
        raise ValueError(f"holding periods differ: {letf.h} vs {spot.h}")
    a = as_float_array(letf, "letf")
    b = as_float_array(spot, "spot")
    check_same_length(a, b, ("letf", "spot"))
    return float(np.mean(a - float(beta) * b))


class OLSRegression(RegressorMixin, BaseEstimator):
    """sklearn-compatible wrapper around :func:`ols_fit`.

    Attributes
    ----------
    coef_ : ndarray of shape (1,)
    intercept_ : float
    fit_ : RegressionFit
    """

    def fit(self, X, y):
        x = np.asarray(X, dtype=float)
        if x.ndim == 2:
            if x.shape[1] != 1:
                raise ValueError(f"expected a single regressor, got {x.shape[1]} columns")
            x = x[:, 0]
        self.fit_ = ols_fit(x, y)
        self.coef_ = np.array([self.fit_.slope])
        self.intercept_ = self.fit_.intercept
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "fit_")
        x = np.asarray(X, dtype=float)
        if x.ndim == 2:
            x = x[:, 0]
        return self.intercept_ + self.coef_[0] * x

    def slope_test(self, beta0=0.0):
        check_is_fitted(self, "fit_")
        return slope_test(self.fit_, beta0)

    def intercept_test(self):
        check_is_fitted(self, "fit_")
        return intercept_test(self.fit_)


def regression_table(x_prices, y_prices, holding_periods=(1,), beta0=None):
    """Fit y-returns on x-returns for each holding period (one row per ``h``)."""
    from .returns import simple_returns

    rows = []
    for h in holding_periods:
        rx = simple_returns(x_prices, h)
        ry = simple_returns(y_prices, h)
        fit = ols_fit(rx.values, ry.values)
        row = {"h": int(h), "n": fit.n, "slope": fit.slope, "intercept": fit.intercept,
               "r2": fit.r2, "rmse": fit.rmse}
        if beta0 is not None:
            st = slope_test(fit, beta0)
            it = intercept_test(fit)
            row.update(slope_t=st.t, slope_p=st.p_value, intercept_t=it.t, intercept_p=it.p_value,
                       return_differential=return_differential(ry, rx, beta0))
        rows.append(row)
    return rows
