"""Regression primitives: least squares, bounded-influence M-estimators and
the Student-t reference used to turn coefficients into two-sided p-values.

All fits include an intercept as the first coefficient.  Standard errors
always come from the unbiased residual variance (denominator m - #coef); the
``dof`` argument only overrides the degrees of freedom of the t reference,
which the two-step procedure needs because its printed test distributions do
not coincide with the residual degrees of freedom.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.special import betainc

from .errors import InvalidDof, RankDeficient, TooFewRows

__all__ = [
    "RegressionFit",
    "fit_ls",
    "fit_m_estimator",
    "student_t_two_sided",
    "irls_weights",
    "mad_scale",
]

# IRLS residual scale falls back to this when the MAD collapses to zero
# (e.g. more than half the residuals identical); keeps weights finite.
ZERO_SCALE = 1e-12

_TUNING_DEFAULTS = {"huber": 1.345, "tukey": 4.685}


@dataclass(frozen=True)
class RegressionFit:
    """Result of a single regression.

    coefficients[0] is the intercept; std_errors and t_values are aligned
    with coefficients, while p_values covers the non-intercept coefficients
    only (one entry per predictor, so it is one shorter).  ``dof`` is the
    degrees of freedom the p-values were computed against.  ``converged``
    is always True for least squares; for M-estimators it records whether
    IRLS met its tolerance (non-convergence is reported, not raised).
    """

    coefficients: np.ndarray
    std_errors: np.ndarray
    t_values: np.ndarray
    p_values: np.ndarray
    dof: int
    converged: bool


def _two_sided_tail(t: np.ndarray, dof: int) -> np.ndarray:
    """P(|T| >= |t|) for T ~ Student-t with ``dof`` degrees of freedom.

    Uses the regularized incomplete beta identity
    ``P(|T| >= t) = I_{v/(v+t^2)}(v/2, 1/2)``, which is exact for all real t
    (including +-inf, which maps to 0).
    """
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = dof / (dof + t * t)
    x = np.where(np.isinf(t), 0.0, x)
    return betainc(dof / 2.0, 0.5, x)


def _check_dof(dof) -> int:
    if isinstance(dof, bool) or dof is None:
        raise InvalidDof(dof)
    value = float(dof)
    if not value.is_integer() or value < 1:
        raise InvalidDof(dof)
    return int(value)


def student_t_two_sided(t: float, dof: int) -> float:
    """Two-sided tail probability of the Student-t distribution.

    Parameters
    ----------
    t : float
        Observed statistic; +-inf is allowed and yields 0.
    dof : int
        Degrees of freedom, an integer >= 1.

    Returns
    -------
    float
        P(|T| >= |t|), exactly 1.0 at t = 0.
    """
    dof = _check_dof(dof)
    t = float(t)
    if np.isnan(t):
        raise ValueError("t statistic must not be NaN")
    return float(_two_sided_tail(np.asarray(t), dof))


def mad_scale(residuals: np.ndarray) -> float:
    """Median absolute deviation rescaled for consistency at the Gaussian."""
    residuals = np.asarray(residuals, dtype=float)
    med = np.median(residuals)
    return float(np.median(np.abs(residuals - med)) / 0.6745)


def irls_weights(u: np.ndarray, kind: str, tuning: float) -> np.ndarray:
    """IRLS weights w(u) for scaled residuals u.

    huber: 1 inside [-k, k], k/|u| outside.
    tukey: (1 - (u/c)^2)^2 inside [-c, c], 0 outside.
    """
    u = np.asarray(u, dtype=float)
    a = np.abs(u)
    if kind == "huber":
        with np.errstate(divide="ignore"):
            return np.where(a <= tuning, 1.0, tuning / a)
    if kind == "tukey":
        scaled = u / tuning
        w = (1.0 - scaled * scaled) ** 2
        return np.where(a <= tuning, w, 0.0)
    raise ValueError(f"unknown M-estimator kind {kind!r}")


def _design(y, x) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=float).ravel()
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ValueError(
            f"predictor shape {x.shape} incompatible with {y.shape[0]} responses"
        )
    if not (np.isfinite(y).all() and np.isfinite(x).all()):
        raise ValueError("regression inputs must be finite")
    design = np.column_stack([np.ones(y.shape[0]), x])
    return design, y


def _finish(design, y, beta, cov_unscaled, weights, dof_override) -> tuple:
    """Common tail: std errors, t statistics, p-values."""
    m, ncoef = design.shape
    resid = y - design @ beta
    if weights is None:
        rss = float(resid @ resid)
    else:
        rss = float(weights @ (resid * resid))
    sigma2 = rss / (m - ncoef)
    variances = sigma2 * np.diag(cov_unscaled)
    std_errors = np.sqrt(np.maximum(variances, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_values = beta / std_errors
    # exact fit: a nonzero coefficient is infinitely significant, a zero one
    # carries no evidence at all
    t_values = np.where(np.isnan(t_values), 0.0, t_values)
    dof = _check_dof(m - ncoef if dof_override is None else dof_override)
    p_values = _two_sided_tail(t_values[1:], dof)
    return std_errors, t_values, p_values, dof


def fit_ls(y, x, dof: int | None = None) -> RegressionFit:
    """Ordinary least squares with intercept.

    Parameters
    ----------
    y : array, shape (m,)
    x : array, shape (m,) or (m, d)
    dof : int, optional
        Degrees of freedom for the t reference; defaults to the residual
        degrees of freedom m - d - 1.

    Raises
    ------
    TooFewRows
        If m <= d + 1 (no residual degrees of freedom).
    RankDeficient
        If the design including the intercept is rank deficient.
    """
    design, y = _design(y, x)
    m, ncoef = design.shape
    if m <= ncoef:
        raise TooFewRows(m, ncoef)
    beta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < ncoef:
        raise RankDeficient(f"design has rank {rank} < {ncoef}")
    cov_unscaled = np.linalg.inv(design.T @ design)
    std_errors, t_values, p_values, dof = _finish(
        design, y, beta, cov_unscaled, None, dof
    )
    return RegressionFit(beta, std_errors, t_values, p_values, dof, True)


def fit_m_estimator(
    y,
    x,
    kind: str,
    tuning: float | None = None,
    tol: float = 1e-6,
    max_iter: int = 50,
    dof: int | None = None,
) -> RegressionFit:
    """Bounded-influence regression via iteratively reweighted least squares.

    The residual scale is the rescaled MAD, recomputed at every iteration;
    the loop stops when the largest coefficient change drops below ``tol``.
    Hitting ``max_iter`` first is reported through ``converged=False`` rather
    than raised: the iterate at that point is still a usable estimate.  The
    covariance is the weighted normal matrix at the final coefficients, with
    variance ``sum(w r^2) / (m - #coef)``, and p-values use the same t
    reference as least squares.
    """
    if kind not in _TUNING_DEFAULTS:
        raise ValueError(f"unknown M-estimator kind {kind!r}")
    if tuning is None:
        tuning = _TUNING_DEFAULTS[kind]
    if tuning <= 0:
        raise ValueError("tuning constant must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    design, y = _design(y, x)
    m, ncoef = design.shape
    if m <= ncoef:
        raise TooFewRows(m, ncoef)
    beta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < ncoef:
        raise RankDeficient(f"design has rank {rank} < {ncoef}")

    def reweighted_matrix(w):
        if np.count_nonzero(w) < ncoef:
            raise RankDeficient("too many zero weights for a full-rank fit")
        a = design.T @ (design * w[:, None])
        try:
            return cho_factor(a), a
        except LinAlgError:
            raise RankDeficient("weighted normal matrix is singular")

    converged = False
    for _ in range(max_iter):
        resid = y - design @ beta
        scale = mad_scale(resid)
        if scale < ZERO_SCALE:
            scale = ZERO_SCALE
        w = irls_weights(resid / scale, kind, tuning)
        factor, _ = reweighted_matrix(w)
        beta_new = cho_solve(factor, design.T @ (w * y))
        delta = float(np.max(np.abs(beta_new - beta)))
        beta = beta_new
        if delta < tol:
            converged = True
            break

    # covariance consistent with the final coefficients
    resid = y - design @ beta
    scale = mad_scale(resid)
    if scale < ZERO_SCALE:
        scale = ZERO_SCALE
    w = irls_weights(resid / scale, kind, tuning)
    factor, a = reweighted_matrix(w)
    cov_unscaled = cho_solve(factor, np.eye(ncoef))
    std_errors, t_values, p_values, dof = _finish(
        design, y, beta, cov_unscaled, w, dof
    )
    return RegressionFit(beta, std_errors, t_values, p_values, dof, converged)
