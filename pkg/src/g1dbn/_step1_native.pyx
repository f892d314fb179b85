# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled first-step scoring kernel.

Statement-for-statement mirror of _step1_numpy (same pivot checks, same
MAD/weight definitions, same final-weight covariance); results agree with
the fallback to floating-point roundoff.  The row computation releases the
GIL so callers can fan rows out over a thread pool.
"""

import numpy as np

from libc.math cimport INFINITY, fabs, sqrt

cdef double RANK_RTOL = 1e-10   # keep in sync with _step1_numpy.RANK_RTOL
cdef double ZERO_SCALE = 1e-12  # keep in sync with regress.ZERO_SCALE
cdef double MAD_GAUSS = 0.6745

EST_LS = 0
EST_HUBER = 1
EST_TUKEY = 2


cdef struct Solve3:
    double b0
    double b1
    double b2
    double a
    double c
    double f
    double piv2
    double piv3
    bint singular


cdef inline Solve3 _solve3(double a, double b, double c, double d, double e,
                           double f, double r0, double r1, double r2) noexcept nogil:
    """Cholesky solve of [[a,b,c],[b,d,e],[c,e,f]] beta = [r0,r1,r2]."""
    cdef Solve3 out
    cdef double l11, l21, l31, l22, l32, l33, u0, u1, u2
    out.a = a
    out.c = c
    out.f = f
    out.b0 = 0.0
    out.b1 = 0.0
    out.b2 = 0.0
    out.piv2 = 0.0
    out.piv3 = 0.0
    out.singular = True
    if a <= 0.0:
        return out
    l11 = sqrt(a)
    l21 = b / l11
    l31 = c / l11
    out.piv2 = d - l21 * l21
    if out.piv2 <= RANK_RTOL * d:
        return out
    l22 = sqrt(out.piv2)
    l32 = (e - l21 * l31) / l22
    out.piv3 = f - l31 * l31 - l32 * l32
    if out.piv3 <= RANK_RTOL * f:
        return out
    l33 = sqrt(out.piv3)
    u0 = r0 / l11
    u1 = (r1 - l21 * u0) / l22
    u2 = (r2 - l31 * u0 - l32 * u1) / l33
    out.b2 = u2 / l33
    out.b1 = (u1 - l32 * out.b2) / l22
    out.b0 = (u0 - l21 * out.b1 - l31 * out.b2) / l11
    out.singular = False
    return out


cdef inline double _abs_t(Solve3 ps, double b1, double rss, Py_ssize_t m) noexcept nogil:
    """|t| of the middle coefficient given the solved system and its RSS."""
    cdef double det, minv11, sigma2
    if rss == 0.0:
        return INFINITY if b1 != 0.0 else 0.0
    det = ps.a * ps.piv2 * ps.piv3
    minv11 = (ps.a * ps.f - ps.c * ps.c) / det
    sigma2 = rss / (m - 3)
    return fabs(b1 / sqrt(sigma2 * minv11))


cdef inline void _isort(double[::1] buf, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double v
    for i in range(1, n):
        v = buf[i]
        j = i - 1
        while j >= 0 and buf[j] > v:
            buf[j + 1] = buf[j]
            j -= 1
        buf[j + 1] = v


cdef inline double _median(double[::1] buf, Py_ssize_t n) noexcept nogil:
    _isort(buf, n)
    if n % 2 == 1:
        return buf[n // 2]
    return 0.5 * (buf[n // 2 - 1] + buf[n // 2])


cdef inline double _mad_scale(double[::1] resid, double[::1] scratch,
                              Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t t
    cdef double med
    for t in range(m):
        scratch[t] = resid[t]
    med = _median(scratch, m)
    for t in range(m):
        scratch[t] = fabs(resid[t] - med)
    return _median(scratch, m) / MAD_GAUSS


cdef inline double _weight(double u, int est, double tuning) noexcept nogil:
    cdef double a = fabs(u), s, w
    if est == 1:  # huber
        return 1.0 if a <= tuning else tuning / a
    # tukey bisquare
    if a <= tuning:
        s = u / tuning
        w = 1.0 - s * s
        return w * w
    return 0.0


cdef void _ls_row(const double[::1] y, const double[:, ::1] z,
                  const double[:, ::1] gram, const double[::1] col_sums,
                  double[::1] zty, double[::1] out) noexcept nogil:
    cdef Py_ssize_t m = z.shape[0], p = z.shape[1]
    cdef Py_ssize_t t, j, k
    cdef double sy = 0.0, yy = 0.0, acc, rss, best, at
    cdef Solve3 ps
    for t in range(m):
        sy += y[t]
        yy += y[t] * y[t]
    for j in range(p):
        acc = 0.0
        for t in range(m):
            acc += z[t, j] * y[t]
        zty[j] = acc
    for j in range(p):
        best = INFINITY
        for k in range(p):
            if k == j:
                continue
            ps = _solve3(m, col_sums[j], col_sums[k], gram[j, j], gram[j, k],
                         gram[k, k], sy, zty[j], zty[k])
            if ps.singular:
                at = 0.0
            else:
                rss = yy - (ps.b0 * sy + ps.b1 * zty[j] + ps.b2 * zty[k])
                if rss < 0.0:
                    rss = 0.0
                at = _abs_t(ps, ps.b1, rss, m)
            if at < best:
                best = at
        out[j] = best


cdef double _irls_pair(const double[::1] y, const double[:, ::1] z, Py_ssize_t j, Py_ssize_t k,
                       int est, double tuning, double tol, int max_iter,
                       double[::1] resid, double[::1] scratch) noexcept nogil:
    cdef Py_ssize_t m = z.shape[0]
    cdef Py_ssize_t t
    cdef int it
    cdef double sw, swzj, swzk, swjj, swjk, swkk, swy, swyj, swyk
    cdef double zjv, zkv, yv, wt, scale, delta, d1, d2, d3, rss
    cdef double b0, b1, b2
    cdef Solve3 ps

    # unweighted start
    sw = swzj = swzk = swjj = swjk = swkk = swy = swyj = swyk = 0.0
    for t in range(m):
        zjv = z[t, j]
        zkv = z[t, k]
        yv = y[t]
        sw += 1.0
        swzj += zjv
        swzk += zkv
        swjj += zjv * zjv
        swjk += zjv * zkv
        swkk += zkv * zkv
        swy += yv
        swyj += yv * zjv
        swyk += yv * zkv
    ps = _solve3(sw, swzj, swzk, swjj, swjk, swkk, swy, swyj, swyk)
    if ps.singular:
        return 0.0
    b0 = ps.b0
    b1 = ps.b1
    b2 = ps.b2

    for it in range(max_iter):
        for t in range(m):
            resid[t] = y[t] - b0 - b1 * z[t, j] - b2 * z[t, k]
        scale = _mad_scale(resid, scratch, m)
        if scale < ZERO_SCALE:
            scale = ZERO_SCALE
        sw = swzj = swzk = swjj = swjk = swkk = swy = swyj = swyk = 0.0
        for t in range(m):
            wt = _weight(resid[t] / scale, est, tuning)
            zjv = z[t, j]
            zkv = z[t, k]
            yv = y[t]
            sw += wt
            swzj += wt * zjv
            swzk += wt * zkv
            swjj += wt * zjv * zjv
            swjk += wt * zjv * zkv
            swkk += wt * zkv * zkv
            swy += wt * yv
            swyj += wt * yv * zjv
            swyk += wt * yv * zkv
        ps = _solve3(sw, swzj, swzk, swjj, swjk, swkk, swy, swyj, swyk)
        if ps.singular:
            return 0.0
        d1 = fabs(ps.b0 - b0)
        d2 = fabs(ps.b1 - b1)
        d3 = fabs(ps.b2 - b2)
        delta = d1
        if d2 > delta:
            delta = d2
        if d3 > delta:
            delta = d3
        b0 = ps.b0
        b1 = ps.b1
        b2 = ps.b2
        if delta < tol:
            break

    # covariance from the weights implied by the final coefficients
    for t in range(m):
        resid[t] = y[t] - b0 - b1 * z[t, j] - b2 * z[t, k]
    scale = _mad_scale(resid, scratch, m)
    if scale < ZERO_SCALE:
        scale = ZERO_SCALE
    sw = swzj = swzk = swjj = swjk = swkk = swy = swyj = swyk = 0.0
    rss = 0.0
    for t in range(m):
        wt = _weight(resid[t] / scale, est, tuning)
        zjv = z[t, j]
        zkv = z[t, k]
        yv = y[t]
        sw += wt
        swzj += wt * zjv
        swzk += wt * zkv
        swjj += wt * zjv * zjv
        swjk += wt * zjv * zkv
        swkk += wt * zkv * zkv
        swy += wt * yv
        swyj += wt * yv * zjv
        swyk += wt * yv * zkv
        rss += wt * resid[t] * resid[t]
    ps = _solve3(sw, swzj, swzk, swjj, swjk, swkk, swy, swyj, swyk)
    if ps.singular:
        return 0.0
    return _abs_t(ps, b1, rss, m)


cdef void _irls_row(const double[::1] y, const double[:, ::1] z, int est, double tuning,
                    double tol, int max_iter, double[::1] resid,
                    double[::1] scratch, double[::1] out) noexcept nogil:
    cdef Py_ssize_t p = z.shape[1]
    cdef Py_ssize_t j, k
    cdef double best, at
    for j in range(p):
        best = INFINITY
        for k in range(p):
            if k == j:
                continue
            at = _irls_pair(y, z, j, k, est, tuning, tol, max_iter, resid, scratch)
            if at < best:
                best = at
        out[j] = best


def row_min_abs_t(y, z, gram, col_sums, estimator_code, tuning, tol, max_iter):
    """min over k != j of |t_jk| for one target; mirrors _step1_numpy."""
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef const double[:, ::1] zv = np.ascontiguousarray(z, dtype=np.float64)
    cdef const double[:, ::1] gv = np.ascontiguousarray(gram, dtype=np.float64)
    cdef const double[::1] sv = np.ascontiguousarray(col_sums, dtype=np.float64)
    cdef Py_ssize_t m = zv.shape[0], p = zv.shape[1]
    if yv.shape[0] != m:
        raise ValueError("response length does not match predictor rows")
    out_arr = np.empty(p, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[::1] buf1 = np.empty(max(m, p), dtype=np.float64)
    cdef double[::1] buf2 = np.empty(max(m, p), dtype=np.float64)
    cdef int est = estimator_code
    cdef double tun = tuning
    cdef double ctol = tol
    cdef int miter = max_iter
    if est == 0:
        with nogil:
            _ls_row(yv, zv, gv, sv, buf1, out)
    elif est == 1 or est == 2:
        with nogil:
            _irls_row(yv, zv, est, tun, ctol, miter, buf1, buf2, out)
    else:
        raise ValueError(f"unknown estimator code {estimator_code}")
    return out_arr
