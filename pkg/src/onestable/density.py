"""Transition densities of the driving process by Fourier inversion.

The characteristic function exp(-t * Phi(p)) is inverted three ways:

* on a regular grid via the FFT (the dual-lattice Riemann sum, which by
  Poisson summation equals the exact density periodized over the grid box),
* at a single point via adaptive quadrature (d = 1 uses an oscillatory
  cosine rule with exponential tail truncation; d = 2 integrates the radial
  part in closed form and quadrates the angle between its kink points),
* on a 1-d grid for an arbitrary even characteristic function (used by the
  decomposition sampler's small-jump table).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, GridTooCoarse, UnsupportedDimension
from .grid import GridField, GridSpec, centered_spec
from .spectral import levy_exponent, nondegeneracy_kappa, sphere_mean_abs_cos

_NYQUIST_LOG = math.log(1e12)  # exp(-t * P_max / kappa) must be < 1e-12


def required_nyquist(mu, t, kappa=None):
    """Smallest admissible Nyquist radius for (mu, t)."""
    if kappa is None:
        kappa = nondegeneracy_kappa(mu).kappa
    return _NYQUIST_LOG * kappa / t


def auto_grid(mu, t, tail_factor=40.0, fine=1.0):
    """Grid spec satisfying the Nyquist gate with extent >= tail_factor*t*kappa.

    `fine` > 1 refines the spacing beyond the minimum requirement.
    """
    from scipy.fft import next_fast_len

    kappa = nondegeneracy_kappa(mu).kappa
    h = math.pi * t / (_NYQUIST_LOG * kappa) / fine
    extent = max(tail_factor * t * kappa, 16.0 * h)
    n = next_fast_len(int(math.ceil(extent / h)))
    return centered_spec(n * h, h, d=mu.dimension)


def exponent_on_mesh(mu, omega):
    """Phi evaluated on a (possibly sparse) frequency mesh, atom by atom.

    Accumulating over pair representatives keeps peak memory at one grid-sized
    array regardless of the number of atoms.
    """
    if mu.kind == "discrete":
        dirs, wts = mu.pairs()
        acc = 0.0
        for theta, w in zip(dirs, wts):
            proj = omega[0] * theta[0]
            for a in range(1, len(omega)):
                proj = proj + omega[a] * theta[a]
            acc = acc + w * np.abs(proj)
        return acc
    r2 = omega[0] ** 2
    for a in range(1, len(omega)):
        r2 = r2 + omega[a] ** 2
    return mu.total_mass * sphere_mean_abs_cos(mu.dimension) * np.sqrt(r2)


def density_grid(mu, t, shift=None, spec=None):
    """Density of Z_t + shift on a regular grid.

    Inverts exp(-t*Phi(p)) * exp(i<p, shift>) over the dual lattice of `spec`.
    The grid must satisfy exp(-t * P_max / kappa) < 1e-12 at the Nyquist
    radius P_max, otherwise GridTooCoarse is raised.  Values are clipped at
    zero; the pre-clip minimum and clip count are recorded in the meta dict.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    if spec is None:
        spec = auto_grid(mu, t)
    if isinstance(spec, GridField):
        spec = spec.spec
    if spec.dimension != mu.dimension:
        raise DimensionError(
            f"grid dimension {spec.dimension} != measure dimension {mu.dimension}"
        )
    kappa = nondegeneracy_kappa(mu).kappa
    p_max = spec.nyquist_radius()
    if t * p_max / kappa < _NYQUIST_LOG:
        raise GridTooCoarse(
            f"Nyquist radius {p_max:.3g} too small: need at least "
            f"{required_nyquist(mu, t, kappa):.3g} for t={t}",
            required_p_max=required_nyquist(mu, t, kappa),
        )
    omega = spec.freq_mesh(sparse=True)
    w = np.exp(-t * exponent_on_mesh(mu, omega))
    phase = np.zeros((1,) * spec.dimension)
    if shift is not None:
        shift = np.atleast_1d(np.asarray(shift, dtype=float))
        if shift.size != mu.dimension:
            raise DimensionError("shift dimension mismatch")
    else:
        shift = np.zeros(mu.dimension)
    for a in range(spec.dimension):
        phase = phase + omega[a] * (shift[a] - spec.origin[a])
    integrand = w * np.exp(1j * phase)
    raw = np.fft.fftn(integrand)
    scale = 1.0 / np.prod([n * h for n, h in zip(spec.shape, spec.spacing)])
    vals = raw.real * scale
    imag_max = float(np.max(np.abs(raw.imag)) * scale)
    min_raw = float(vals.min())
    clip_count = int(np.count_nonzero(vals < 0))
    np.clip(vals, 0.0, None, out=vals)
    return GridField(
        spec=spec,
        values=vals,
        meta={
            "t": t,
            "kappa": kappa,
            "min_raw": min_raw,
            "clip_count": clip_count,
            "imag_max": imag_max,
        },
    )


def density_point(mu, t, x, eps=1e-10):
    """Density of Z_t at a single point by adaptive quadrature (d <= 2)."""
    from scipy.integrate import quad

    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != mu.dimension:
        raise DimensionError("point dimension mismatch")
    nondegeneracy_kappa(mu)  # degeneracy gate
    d = mu.dimension
    if d == 1:
        wexp = float(levy_exponent(mu, np.array([1.0])))
        # truncate where exp(-t*w*p) < 1e-16; the remaining tail is below
        # exp(-t*w*P)/(t*w) in absolute value
        p_cut = 37.0 / (t * wexp)
        if x[0] == 0.0:
            val, _ = quad(lambda p: math.exp(-t * wexp * p), 0.0, p_cut, epsabs=eps)
        else:
            val, _ = quad(
                lambda p: math.exp(-t * wexp * p),
                0.0,
                p_cut,
                weight="cos",
                wvar=float(x[0]),
                epsabs=eps,
            )
        return val / math.pi
    if d == 2:
        # polar coordinates: the radial integral of r*exp(-t*g*r)*cos(s*r)
        # is (g^2 t^2 - s^2)/(g^2 t^2 + s^2)^2 in closed form, leaving a
        # piecewise-smooth angular integrand with kinks where <u, theta_k> = 0
        def angular(a):
            u = (math.cos(a), math.sin(a))
            g = t * float(levy_exponent(mu, np.array(u)))
            s = u[0] * x[0] + u[1] * x[1]
            g2, s2 = g * g, s * s
            return (g2 - s2) / (g2 + s2) ** 2

        breaks = {0.0, 2.0 * math.pi}
        if mu.kind == "discrete":
            for row in mu.directions:
                a = math.atan2(row[1], row[0])
                for kink in (a + 0.5 * math.pi, a - 0.5 * math.pi):
                    breaks.add(kink % (2.0 * math.pi))
        pts = sorted(breaks)
        total = 0.0
        for lo, hi in zip(pts[:-1], pts[1:]):
            if hi - lo < 1e-14:
                continue
            val, _ = quad(angular, lo, hi, epsabs=eps, limit=200)
            total += val
        return total / (4.0 * math.pi * math.pi)
    raise UnsupportedDimension("density_point supports d <= 2")


def grid_cdf_1d(fld):
    """Trapezoid CDF of a 1-d density field, pinned to [0, 1]."""
    if fld.dimension != 1:
        raise UnsupportedDimension("CDF helper is one-dimensional")
    h = fld.spec.spacing[0]
    v = fld.values
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * h)])
    total = cdf[-1]
    tail = max(0.0, 1.0 - total)  # mass beyond the grid window, split evenly
    cdf = cdf + 0.5 * tail
    cdf[0] = 0.0
    cdf[-1] = 1.0
    np.clip(cdf, 0.0, 1.0, out=cdf)
    return np.maximum.accumulate(cdf)


def cdf_callable_1d(fld):
    xs = fld.spec.axes()[0]
    cdf = grid_cdf_1d(fld)

    def F(x):
        return np.interp(x, xs, cdf, left=0.0, right=1.0)

    return F


def invert_even_cf_1d(log_cf, u_decay, x_extent, n=1 << 15):
    """Density grid for a symmetric scalar law given its log-characteristic fn.

    `log_cf` maps u >= 0 to log E cos(uX); `u_decay` is a frequency beyond
    which the cf is negligible (< 1e-14); the returned field covers
    [-x_extent/2, x_extent/2).
    """
    h = math.pi / u_decay
    n = int(max(n, 2 ** math.ceil(math.log2(max(x_extent / h, 16)))))
    spec = centered_spec(n * h, h, d=1)
    omega = spec.freq_axes()[0]
    w = np.exp(log_cf(np.abs(omega)))
    phase = -omega * spec.origin[0]
    raw = np.fft.fftn(w * np.exp(1j * phase))
    vals = np.clip(raw.real / (n * h), 0.0, None)
    return GridField(spec=spec, values=vals)


@dataclass(frozen=True)
class ScalingProbeReport:
    order: int
    t_values: tuple
    sup_norms: tuple
    scaled: tuple  # sup |D^beta p_t| * t^(d + order)
    max_over_min: float
    flagged: bool


def derivative_scaling_probe(mu, t_values, order, fine=1.0):
    """Check sup |D^beta p_{Z_t}| * t^(d+|beta|) is constant across t.

    The derivative is taken along the first axis with the spectral
    multiplier; self-similarity makes the scaled sup-norm t-independent.
    Ratios drifting past 1.05 set the `flagged` bit.
    """
    if order not in (0, 1, 2):
        raise ValueError(f"derivative order must be 0, 1 or 2, got {order}")
    d = mu.dimension
    sups = []
    for t in t_values:
        spec = auto_grid(mu, t, fine=fine)
        fld = density_grid(mu, t, spec=spec)
        if order == 0:
            sups.append(fld.norm(np.inf, interior_margin=0.05))
            continue
        omega = spec.freq_mesh(sparse=True)[0]
        w = np.fft.fftn(fld.values) * (1j * omega) ** order
        deriv = np.fft.ifftn(w).real
        interior = GridField(spec=spec, values=deriv)
        sups.append(interior.norm(np.inf, interior_margin=0.05))
    scaled = tuple(s * t ** (d + order) for s, t in zip(sups, t_values))
    ratio = max(scaled) / min(scaled)
    return ScalingProbeReport(
        order=order,
        t_values=tuple(t_values),
        sup_norms=tuple(sups),
        scaled=scaled,
        max_over_min=float(ratio),
        flagged=bool(ratio > 1.05),
    )


def project_measure(mu, direction):
    """One-dimensional measure of the projection <u, Z_t>.

    The projected process is symmetric 1-stable on the line with exponent
    Phi(u)*|s|, i.e. a two-atom measure of total mass Phi(u).
    """
    from .spectral import SpectralMeasure

    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    w = float(levy_exponent(mu, u))
    return SpectralMeasure(
        dimension=1,
        kind="discrete",
        directions=np.array([[1.0], [-1.0]]),
        masses=np.array([w / 2.0, w / 2.0]),
    )
