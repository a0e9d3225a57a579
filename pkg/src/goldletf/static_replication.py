"""Static replication by equality-constrained least squares.

Minimise ``||C w - d||^2`` subject to ``sum(w) == 1`` where column 0 of ``C``
is the money-market account and the remaining columns are futures series,
every column (and ``d``) scaled to start at 1.
"""

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import check_positive, check_same_calendar

logger = logging.getLogger(__name__)

CONDITION_WARN = 1e12


class IllConditionedWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ReplicationWeights:
    """Money-market weight ``weights[0]`` and futures weights, summing to one.

    ``sse`` is on the unit-normalized scale; multiply by ``capital**2`` for
    dollars.
    """

    weights: np.ndarray
    sse: float
    multiplier: float
    kkt_residual: float
    condition_number: float
    degenerate: bool = False

    @property
    def w0(self):
        return float(self.weights[0])

    @property
    def leverage(self):
        """Total futures exposure, ``1 - w0``."""
        return 1.0 - self.w0


def normalize(series, target=None, capital=1000.0):
    """Stack instrument series into a design matrix with a unit first row.

    Parameters
    ----------
    series : list of PriceSeries or array-like
        Money-market account first, then the futures.
    target : PriceSeries or array-like, optional
    capital : float
        Kept for the interface; values are held at unit scale and errors are
        re-expressed per ``capital`` by the callers.

    Returns
    -------
    (C, d) with ``d`` None when no target was given.
    """
    check_positive(capital, "capital")
    items = list(series) + ([target] if target is not None else [])
    check_same_calendar(*items)
    cols = [np.asarray(getattr(s, "values", s), dtype=float) for s in series]
    C = check_array(np.column_stack(cols), ensure_min_samples=1)
    if np.any(C <= 0):
        raise ValueError("instrument prices must be strictly positive")
    C = C / C[0]
    d = None
    if target is not None:
        d = np.asarray(getattr(target, "values", target), dtype=float)
        if d.shape != (C.shape[0],):
            raise ValueError(f"target has shape {d.shape}, expected ({C.shape[0]},)")
        if not np.all(np.isfinite(d)) or np.any(d <= 0):
            raise ValueError("target must be positive and finite")
        d = d / d[0]
    return C, d


def _kkt_residual(C, d, w, lam):
    # bordered system [2C'C 1; 1' 0][w; lam] = [2C'd; 1]
    m = C.shape[1]
    K = np.zeros((m + 1, m + 1))
    K[:m, :m] = 2.0 * C.T @ C
    K[:m, m] = 1.0
    K[m, :m] = 1.0
    rhs = np.concatenate((2.0 * C.T @ d, [1.0]))
    z = np.concatenate((w, [lam]))
    resid = K @ z - rhs
    scale = np.linalg.norm(K, np.inf) * np.linalg.norm(z, np.inf) + np.linalg.norm(rhs, np.inf)
    return float(np.linalg.norm(resid, np.inf) / scale), K, rhs


def _nullspace_basis(m):
    # orthonormal basis for {v : sum(v) = 0} via QR of the ones vector
    q, _ = np.linalg.qr(np.ones((m, 1)), mode="complete")
    return q[:, 1:]


def solve_constrained_lsq(C, d, method="nullspace"):
    """Minimiser of ``||C w - d||^2`` with ``sum(w) = 1``.

    Parameters
    ----------
    C : ndarray of shape (n, m)
    d : ndarray of shape (n,)
    method : {"nullspace", "kkt"}
        ``"kkt"`` solves the bordered Lagrangian system directly.
        ``"nullspace"`` eliminates the constraint and solves the reduced
        least-squares problem by SVD, which avoids squaring the condition
        number of ``C`` and returns the minimum-norm weights when the
        minimiser is not unique. Both report the Lagrangian KKT residual.

    Returns
    -------
    ReplicationWeights
    """
    C = check_array(C, ensure_min_samples=1)
    d = np.asarray(d, dtype=float)
    if d.shape != (C.shape[0],):
        raise ValueError(f"d has shape {d.shape}, expected ({C.shape[0]},)")
    if method not in ("nullspace", "kkt"):
        raise ValueError(f"unknown method {method!r}")
    n, m = C.shape

    gram = C.T @ C
    with np.errstate(all="ignore"):
        cond = float(np.linalg.cond(gram)) if m > 1 else 1.0
    if not math.isfinite(cond):
        cond = math.inf
    if cond > CONDITION_WARN:
        warnings.warn(f"C'C condition number {cond:.3g} exceeds {CONDITION_WARN:g}; "
                      "weights may be unstable", IllConditionedWarning, stacklevel=2)

    Z = _nullspace_basis(m)
    w_base = np.full(m, 1.0 / m)
    A = C @ Z
    if m > 1:
        U, sv, Vt = np.linalg.svd(A, full_matrices=False)
    else:
        sv = np.array([])
    # cutoff is relative to the scale of C itself: C Z can be pure rounding noise
    tol = max(n, m) * np.finfo(float).eps * np.linalg.norm(C, 2)
    degenerate = bool(sv.size and sv[-1] <= tol) or n < m - 1

    if method == "kkt" and not degenerate:
        K = np.zeros((m + 1, m + 1))
        K[:m, :m] = 2.0 * gram
        K[:m, m] = 1.0
        K[m, :m] = 1.0
        rhs = np.concatenate((2.0 * C.T @ d, [1.0]))
        z = np.linalg.solve(K, rhs)
        w, lam = z[:m], float(z[m])
    else:
        if m > 1:
            keep = sv > tol
            y = Vt[keep].T @ ((U[:, keep].T @ (d - C @ w_base)) / sv[keep])
            w = w_base + Z @ y
        else:
            w = np.ones(1)
        # stationarity: 2C'(Cw - d) + lam*1 = 0, lam from the mean component
        lam = float(-2.0 * np.mean(C.T @ (C @ w - d)))
    if degenerate:
        logger.warning("rank-deficient replication problem; returning minimum-norm weights")

    resid = C @ w - d
    kkt, _, _ = _kkt_residual(C, d, w, lam)
    return ReplicationWeights(weights=w, sse=float(resid @ resid), multiplier=lam,
                              kkt_residual=kkt, condition_number=cond, degenerate=degenerate)


def portfolio_value(weights, C_out, capital=1000.0):
    """Value path of fixed weights on a unit-normalized design matrix, scaled to ``capital``."""
    w = np.asarray(getattr(weights, "weights", weights), dtype=float)
    C_out = np.asarray(C_out, dtype=float)
    if C_out.ndim != 2 or C_out.shape[1] != w.size:
        raise ValueError(f"design matrix has {C_out.shape[-1]} columns, weights have {w.size}")
    return capital * (C_out @ w)


class StaticReplicator(RegressorMixin, BaseEstimator):
    """Fixed-weight money-market + futures portfolio fitted to a target path.

    ``X`` holds raw instrument prices, money-market account first. Every call
    re-normalizes ``X`` (and ``y``) to its own first row, so ``predict`` on an
    out-of-sample window starts the portfolio at ``capital``.

    Parameters
    ----------
    capital : float, default 1000
    method : {"nullspace", "kkt"}
    """

    def __init__(self, capital=1000.0, method="nullspace"):
        self.capital = capital
        self.method = method

    def fit(self, X, y):
        C, d = normalize(_columns(X), y, self.capital)
        self.solution_ = solve_constrained_lsq(C, d, self.method)
        self.weights_ = self.solution_.weights
        self.n_features_in_ = C.shape[1]
        self.sse_ = self.solution_.sse * self.capital ** 2
        self.rmse_ = math.sqrt(self.sse_ / C.shape[0])
        return self

    def predict(self, X):
        check_is_fitted(self, "weights_")
        C, _ = normalize(_columns(X), None, self.capital)
        if C.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {C.shape[1]} columns, fitted with {self.n_features_in_}")
        return portfolio_value(self.weights_, C, self.capital)

    def tracking_rmse(self, X, y):
        """RMSE of the portfolio against ``y`` rescaled to ``capital``, both started at ``capital``."""
        v = self.predict(X)
        _, d = normalize(_columns(X), y, self.capital)
        gap = v - self.capital * d
        return math.sqrt(float(gap @ gap) / gap.size)


def _columns(X):
    if isinstance(X, (list, tuple)):
        return list(X)
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    return [arr[:, i] for i in range(arr.shape[1])]
