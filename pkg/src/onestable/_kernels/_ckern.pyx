# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batched generator quadrature.

Same contract and summation layout as _pykern.generator_batch.  The
Gaussian-windowed families additionally restrict the radial loop to the
nodes where either exponential is above underflow (|s +- rho| <= 10.5
sigma); the discarded terms are below 1e-24 relative.
"""

from libc.math cimport cos, exp, fabs

import numpy as np

BACKEND = "c"

cdef double PI = 3.141592653589793
cdef double ZCUT = 10.5


cdef Py_ssize_t _lower(const double[::1] arr, double x) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = arr.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if arr[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef void _bump_pair(double[::1] out, const double[:, ::1] pts,
                     const double[::1] params, const double[::1] theta,
                     double pref, const double[::1] rho,
                     const double[::1] wr2, double s0,
                     double rho_min) noexcept nogil:
    cdef Py_ssize_t n = pts.shape[0], d = pts.shape[1]
    cdef double amp = params[0], sigma = params[1]
    cdef double inv2s2 = 1.0 / (2.0 * sigma * sigma)
    cdef double inv_s2 = 1.0 / (sigma * sigma)
    cdef double win = ZCUT * sigma
    cdef Py_ssize_t i, j, r, rlo, rhi
    cdef double yj, s, r2, perp2, base, phi0, sabs, acc, dp, dm, quad, qform
    for i in range(n):
        s = 0.0
        r2 = 0.0
        for j in range(d):
            yj = pts[i, j] - params[2 + j]
            s += yj * theta[j]
            r2 += yj * yj
        perp2 = r2 - s * s
        if perp2 < 0.0:
            perp2 = 0.0
        base = amp * exp(-perp2 * inv2s2)
        if fabs(base) < 1e-290:
            continue
        sabs = fabs(s)
        phi0 = base * exp(-s * s * inv2s2)
        acc = 0.0
        rlo = _lower(rho, sabs - win)
        rhi = _lower(rho, sabs + win)
        for r in range(rlo, rhi):
            dp = s + rho[r]
            dm = s - rho[r]
            acc += (exp(-dp * dp * inv2s2) + exp(-dm * dm * inv2s2)) * wr2[r]
        quad = base * acc - 2.0 * phi0 * s0
        qform = phi0 * (s * s * inv_s2 * inv_s2 - inv_s2)
        out[i] += pref * (rho_min * qform + quad)


cdef void _trig_pair(double[::1] out, const double[:, ::1] pts,
                     const double[::1] params, const double[::1] theta,
                     double pref, const double[::1] rho,
                     const double[::1] wr2, double rho_min) noexcept nogil:
    cdef Py_ssize_t n = pts.shape[0], d = pts.shape[1], nr = rho.shape[0]
    cdef double amp = params[0], phase = params[1]
    cdef double a = 0.0, radial = 0.0
    cdef Py_ssize_t i, j, r
    cdef double arg, factor
    for j in range(d):
        a += params[2 + j] * theta[j]
    for r in range(nr):
        radial += (cos(a * rho[r]) - 1.0) * wr2[r]
    factor = pref * (2.0 * radial - rho_min * a * a)
    for i in range(n):
        arg = phase
        for j in range(d):
            arg += pts[i, j] * params[2 + j]
        out[i] += factor * amp * cos(arg)


cdef void _polywin_pair(double[::1] out, const double[:, ::1] pts,
                        const double[::1] params, const double[::1] theta,
                        double pref, const double[::1] rho,
                        const double[::1] wr2, double s0,
                        double rho_min) noexcept nogil:
    cdef Py_ssize_t n = pts.shape[0], d = pts.shape[1]
    cdef double amp = params[0], sigma = params[1]
    cdef double c0 = params[2], c1 = params[3], c2 = params[4], c3 = params[5]
    cdef double inv2s2 = 1.0 / (2.0 * sigma * sigma)
    cdef double inv_s2 = 1.0 / (sigma * sigma)
    cdef double win = ZCUT * sigma
    cdef double a_th = 0.0
    cdef Py_ssize_t i, j, r, rlo, rhi
    cdef double yj, s, sa, r2, perp2, base, gauss0, phi0, sabs
    cdef double acc, dp, dm, ap, am, pp, pm, pv, pd, pdd, quad, qform
    for j in range(d):
        a_th += params[6 + d + j] * theta[j]
    for i in range(n):
        s = 0.0
        sa = 0.0
        r2 = 0.0
        for j in range(d):
            yj = pts[i, j] - params[6 + j]
            s += yj * theta[j]
            sa += yj * params[6 + d + j]
            r2 += yj * yj
        perp2 = r2 - s * s
        if perp2 < 0.0:
            perp2 = 0.0
        base = amp * exp(-perp2 * inv2s2)
        if fabs(base) < 1e-290:
            continue
        sabs = fabs(s)
        pv = c0 + sa * (c1 + sa * (c2 + sa * c3))
        pd = c1 + sa * (2.0 * c2 + sa * 3.0 * c3)
        pdd = 2.0 * c2 + 6.0 * c3 * sa
        gauss0 = base * exp(-s * s * inv2s2)
        phi0 = gauss0 * pv
        acc = 0.0
        rlo = _lower(rho, sabs - win)
        rhi = _lower(rho, sabs + win)
        for r in range(rlo, rhi):
            dp = s + rho[r]
            dm = s - rho[r]
            ap = sa + a_th * rho[r]
            am = sa - a_th * rho[r]
            pp = c0 + ap * (c1 + ap * (c2 + ap * c3))
            pm = c0 + am * (c1 + am * (c2 + am * c3))
            acc += (exp(-dp * dp * inv2s2) * pp + exp(-dm * dm * inv2s2) * pm) * wr2[r]
        quad = base * acc - 2.0 * phi0 * s0
        qform = gauss0 * (pdd * a_th * a_th
                          - 2.0 * pd * a_th * s * inv_s2
                          + pv * (s * s * inv_s2 * inv_s2 - inv_s2))
        out[i] += pref * (rho_min * qform + quad)


def generator_batch(points, int family, params, dirs, weights, rho, rho_w,
                    double rho_min):
    cdef double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef double[::1] par = np.ascontiguousarray(params, dtype=np.float64)
    cdef double[:, ::1] drs = np.ascontiguousarray(dirs, dtype=np.float64)
    cdef double[::1] wts = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[::1] rh = np.ascontiguousarray(rho, dtype=np.float64)
    wr2_arr = np.ascontiguousarray(rho_w, dtype=np.float64) / np.asarray(rho) ** 2
    cdef double[::1] wr2 = wr2_arr
    cdef double s0 = float(wr2_arr.sum())
    out_arr = np.zeros(pts.shape[0])
    cdef double[::1] out = out_arr
    cdef double[::1] theta
    cdef double pref
    cdef Py_ssize_t k
    for k in range(drs.shape[0]):
        theta = drs[k]
        pref = wts[k] / PI
        if family == 0:
            with nogil:
                _bump_pair(out, pts, par, theta, pref, rh, wr2, s0, rho_min)
        elif family == 1:
            with nogil:
                _trig_pair(out, pts, par, theta, pref, rh, wr2, rho_min)
        else:
            with nogil:
                _polywin_pair(out, pts, par, theta, pref, rh, wr2, s0, rho_min)
    return out_arr
