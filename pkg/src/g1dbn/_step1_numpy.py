"""Vectorized first-step scoring kernel (pure numpy fallback).

For one target variable with responses y (m values) and lagged predictors
z (m x p), the kernel returns, for every candidate parent j, the smallest
absolute t statistic of the parent coefficient over all conditioning
variables k != j, where each (j, k) regression is y ~ 1 + z_j + z_k.  The
two-sided tail is monotone in |t| at fixed degrees of freedom, so the
caller recovers max-over-k p-values from min-over-k |t|.

Encoding: a rank-deficient (j, k) design contributes |t| = 0 (p-value 1);
an exact fit with a nonzero parent coefficient contributes |t| = inf
(p-value 0).

The compiled kernel in _step1_native mirrors these formulas statement for
statement; keep the two in sync (RANK_RTOL, ZERO_SCALE, pivot checks,
final-weight covariance).
"""

from __future__ import annotations

import numpy as np

from .regress import ZERO_SCALE, irls_weights

# relative pivot threshold of the elementwise 3x3 Cholesky
RANK_RTOL = 1e-10

EST_LS = 0
EST_HUBER = 1
EST_TUKEY = 2

_KIND_BY_CODE = {EST_HUBER: "huber", EST_TUKEY: "tukey"}


def _pair_chol(a, b, c, d, e, f):
    """Elementwise Cholesky of [[a,b,c],[b,d,e],[c,e,f]] with pivot checks."""
    with np.errstate(invalid="ignore", divide="ignore"):
        singular = np.asarray(a <= 0.0)
        l11 = np.sqrt(np.where(singular, 1.0, a))
        l21 = b / l11
        l31 = c / l11
        piv2 = d - l21 * l21
        singular = singular | (piv2 <= RANK_RTOL * d)
        l22 = np.sqrt(np.where(singular, 1.0, piv2))
        l32 = (e - l21 * l31) / l22
        piv3 = f - l31 * l31 - l32 * l32
        singular = singular | (piv3 <= RANK_RTOL * f)
        l33 = np.sqrt(np.where(singular, 1.0, piv3))
    return l11, l21, l31, l22, l32, l33, piv2, piv3, singular


def _pair_solve(l11, l21, l31, l22, l32, l33, r0, r1, r2):
    with np.errstate(invalid="ignore", divide="ignore"):
        u0 = r0 / l11
        u1 = (r1 - l21 * u0) / l22
        u2 = (r2 - l31 * u0 - l32 * u1) / l33
        b2 = u2 / l33
        b1 = (u1 - l32 * b2) / l22
        b0 = (u0 - l21 * b1 - l31 * b2) / l11
    return b0, b1, b2


def _row_ls(y, z, gram, col_sums):
    m, p = z.shape
    a = float(m)
    sy = float(y.sum())
    yy = float(y @ y)
    c = z.T @ y
    diag = np.diag(gram)

    # axis 0 indexes the candidate parent j, axis 1 the conditioning k
    bj = col_sums[:, None]
    ck = col_sums[None, :]
    dj = diag[:, None]
    fk = diag[None, :]
    r1 = c[:, None]
    r2 = c[None, :]

    l11, l21, l31, l22, l32, l33, piv2, piv3, singular = _pair_chol(
        a, bj, ck, dj, gram, fk
    )
    with np.errstate(invalid="ignore", divide="ignore"):
        b0, b1, b2 = _pair_solve(l11, l21, l31, l22, l32, l33, sy, r1, r2)
        rss = np.maximum(yy - (b0 * sy + b1 * r1 + b2 * r2), 0.0)
        det = a * piv2 * piv3
        minv11 = (a * fk - ck * ck) / det
        se2 = (rss / (m - 3)) * minv11
        abs_t = np.abs(b1 / np.sqrt(se2))
        abs_t = np.where(rss == 0.0, np.where(b1 != 0.0, np.inf, 0.0), abs_t)
    abs_t = np.where(singular, 0.0, abs_t)
    np.fill_diagonal(abs_t, np.inf)
    return abs_t.min(axis=1)


def _weighted_entries(y, zj, z, w):
    sw = w.sum(axis=0)
    swzj = (w * zj[:, None]).sum(axis=0)
    swzk = (w * z).sum(axis=0)
    swzjzj = (w * (zj * zj)[:, None]).sum(axis=0)
    swzjzk = (w * zj[:, None] * z).sum(axis=0)
    swzkzk = (w * z * z).sum(axis=0)
    swy = (w * y[:, None]).sum(axis=0)
    swyzj = (w * (y * zj)[:, None]).sum(axis=0)
    swyzk = (w * y[:, None] * z).sum(axis=0)
    return sw, swzj, swzk, swzjzj, swzjzk, swzkzk, swy, swyzj, swyzk


def _weighted_solve(y, zj, z, w):
    entries = _weighted_entries(y, zj, z, w)
    sw, swzj, swzk, swzjzj, swzjzk, swzkzk, swy, swyzj, swyzk = entries
    l11, l21, l31, l22, l32, l33, piv2, piv3, singular = _pair_chol(
        sw, swzj, swzk, swzjzj, swzjzk, swzkzk
    )
    b0, b1, b2 = _pair_solve(l11, l21, l31, l22, l32, l33, swy, swyzj, swyzk)
    return b0, b1, b2, singular


def _scaled_weights(y, zj, z, b0, b1, b2, kind, tuning):
    resid = y[:, None] - (b0 + b1 * zj[:, None] + b2 * z)
    med = np.median(resid, axis=0)
    scale = np.median(np.abs(resid - med), axis=0) / 0.6745
    scale = np.maximum(scale, ZERO_SCALE)
    return resid, irls_weights(resid / scale, kind, tuning)


def _row_irls(y, z, kind, tuning, tol, max_iter):
    m, p = z.shape
    out = np.empty(p)
    ones = np.ones((m, p))
    for j in range(p):
        zj = z[:, j]
        b0, b1, b2, dead = _weighted_solve(y, zj, z, ones)
        active = ~dead
        for _ in range(max_iter):
            if not active.any():
                break
            _, w = _scaled_weights(y, zj, z, b0, b1, b2, kind, tuning)
            n0, n1, n2, singular = _weighted_solve(y, zj, z, w)
            dead = dead | (active & singular)
            update = active & ~singular
            with np.errstate(invalid="ignore"):
                delta = np.maximum(
                    np.abs(n0 - b0), np.maximum(np.abs(n1 - b1), np.abs(n2 - b2))
                )
            b0 = np.where(update, n0, b0)
            b1 = np.where(update, n1, b1)
            b2 = np.where(update, n2, b2)
            active = update & ~(delta < tol)

        # covariance from the weights implied by the final coefficients
        resid, w = _scaled_weights(y, zj, z, b0, b1, b2, kind, tuning)
        entries = _weighted_entries(y, zj, z, w)
        sw, swzj, swzk, swzjzj, swzjzk, swzkzk = entries[:6]
        chol = _pair_chol(sw, swzj, swzk, swzjzj, swzjzk, swzkzk)
        piv2, piv3, singular = chol[6], chol[7], chol[8]
        with np.errstate(invalid="ignore", divide="ignore"):
            rss = (w * resid * resid).sum(axis=0)
            det = sw * piv2 * piv3
            minv11 = (sw * swzkzk - swzk * swzk) / det
            se2 = (rss / (m - 3)) * minv11
            abs_t = np.abs(b1 / np.sqrt(se2))
            abs_t = np.where(rss == 0.0, np.where(b1 != 0.0, np.inf, 0.0), abs_t)
        abs_t = np.where(dead | singular, 0.0, abs_t)
        abs_t[j] = np.inf
        out[j] = abs_t.min()
    return out


def row_min_abs_t(y, z, gram, col_sums, estimator_code, tuning, tol, max_iter):
    """min over k != j of |t_jk| for one target; see module docstring."""
    y = np.ascontiguousarray(y, dtype=float)
    z = np.ascontiguousarray(z, dtype=float)
    if estimator_code == EST_LS:
        return _row_ls(y, z, gram, col_sums)
    kind = _KIND_BY_CODE[estimator_code]
    return _row_irls(y, z, kind, tuning, tol, max_iter)
