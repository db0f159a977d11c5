"""Pure-numpy fallback for the batched generator quadrature.

Same summation layout as the compiled kernel: loop over direction pairs,
inner-closure term rho_min * qform, then the log-trapezoid radial sum of the
symmetric second difference divided by rho^2.  Points are processed in
chunks so the (chunk, n_rho) work arrays stay cache-sized.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

_CHUNK_ELEMS = 1 << 22


def generator_batch(points, family, params, dirs, weights, rho, rho_w, rho_min):
    n, d = points.shape
    out = np.zeros(n)
    wr2 = rho_w / rho**2
    s0 = wr2.sum()
    chunk = max(1, _CHUNK_ELEMS // max(1, rho.size))
    inv_pi = 1.0 / np.pi
    for lo in range(0, n, chunk):
        pts = points[lo : lo + chunk]
        acc = np.zeros(pts.shape[0])
        for k in range(dirs.shape[0]):
            theta = dirs[k]
            w = weights[k]
            if family == 0:
                val = _bump_pair(params, pts, theta, rho, wr2, s0, rho_min)
            elif family == 1:
                val = _trig_pair(params, pts, theta, rho, wr2, s0, rho_min)
            else:
                val = _polywin_pair(params, pts, theta, rho, wr2, s0, rho_min)
            acc += w * inv_pi * val
        out[lo : lo + chunk] = acc
    return out


def _bump_pair(params, pts, theta, rho, wr2, s0, rho_min):
    amp, sigma = params[0], params[1]
    center = params[2:]
    inv2s2 = 1.0 / (2.0 * sigma * sigma)
    y = pts - center
    s = y @ theta
    perp2 = np.maximum(np.sum(y * y, axis=1) - s * s, 0.0)
    base = amp * np.exp(-perp2 * inv2s2)
    phi0 = base * np.exp(-s * s * inv2s2)
    ep = np.exp(-((s[:, None] + rho[None, :]) ** 2) * inv2s2)
    em = np.exp(-((s[:, None] - rho[None, :]) ** 2) * inv2s2)
    quad = base * ((ep + em) @ wr2) - 2.0 * phi0 * s0
    qform = phi0 * (s * s / sigma**4 - 1.0 / sigma**2)
    return rho_min * qform + quad


def _trig_pair(params, pts, theta, rho, wr2, s0, rho_min):
    amp, phase = params[0], params[1]
    omega = params[2:]
    a = float(omega @ theta)
    radial = float((np.cos(a * rho) - 1.0) @ wr2)
    phi0 = amp * np.cos(pts @ omega + phase)
    return phi0 * (2.0 * radial - rho_min * a * a)


def _polywin_pair(params, pts, theta, rho, wr2, s0, rho_min):
    amp, sigma = params[0], params[1]
    c = params[2:6]
    dim = pts.shape[1]
    center = params[6 : 6 + dim]
    axis = params[6 + dim : 6 + 2 * dim]
    inv2s2 = 1.0 / (2.0 * sigma * sigma)
    a_th = float(axis @ theta)
    y = pts - center
    s = y @ theta
    sa = y @ axis
    perp2 = np.maximum(np.sum(y * y, axis=1) - s * s, 0.0)
    base = amp * np.exp(-perp2 * inv2s2)
    gauss0 = base * np.exp(-s * s * inv2s2)
    pv = c[0] + sa * (c[1] + sa * (c[2] + sa * c[3]))
    pd = c[1] + sa * (2 * c[2] + sa * 3 * c[3])
    pdd = 2 * c[2] + 6 * c[3] * sa
    phi0 = gauss0 * pv
    arg_p = sa[:, None] + a_th * rho[None, :]
    arg_m = sa[:, None] - a_th * rho[None, :]
    pp = c[0] + arg_p * (c[1] + arg_p * (c[2] + arg_p * c[3]))
    pm = c[0] + arg_m * (c[1] + arg_m * (c[2] + arg_m * c[3]))
    ep = np.exp(-((s[:, None] + rho[None, :]) ** 2) * inv2s2) * pp
    em = np.exp(-((s[:, None] - rho[None, :]) ** 2) * inv2s2) * pm
    quad = base * ((ep + em) @ wr2) - 2.0 * phi0 * s0
    qform = gauss0 * (
        pdd * a_th * a_th
        - 2.0 * pd * a_th * s / sigma**2
        + pv * (s * s / sigma**4 - 1.0 / sigma**2)
    )
    return rho_min * qform + quad
