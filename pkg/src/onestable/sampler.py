"""Exact and decomposition sampling of the driving increments.

Two interchangeable schemes:

* exact_ray: for a discrete measure the process splits over the atom pairs,
  Z_t = sum_k w_k * t * C_k * theta_k with independent standard Cauchy C_k
  and w_k the pair's total mass; isotropic measures use the elliptic
  representation G / |N| scaled to match the exponent.

* decomposition: jumps are cut at radius t.  The big-jump part is compound
  Poisson (rate (2/pi) * mass, radii t/U, directions from the normalized
  measure); the small-jump remainder is drawn per pair from a tabulated
  Fourier inversion of its characteristic function.  Both parts obey the
  t-scaling of the whole process, so the table is built once per pair weight
  at t = 1 and rescaled.

The Levy measure carries the prefactor 2/pi relative to the spectral
measure; that normalization is what makes exp(-t*Phi) the characteristic
function of the sum of the two parts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionError,
    EmptyBatch,
    UnsupportedScheme,
)
from .rng import chunk_streams
from .spectral import sphere_mean_abs_cos

TWO_OVER_PI = 2.0 / math.pi


@dataclass
class IncrementBatch:
    dimension: int
    t: float
    scheme: str
    seed: int
    samples: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[1] != self.dimension:
            raise DimensionError(
                f"samples shape {s.shape} does not match dimension {self.dimension}"
            )
        if s.shape[0] < 1:
            raise EmptyBatch("batch holds no samples")
        self.samples = s

    @property
    def n(self):
        return self.samples.shape[0]

    def to_csv(self, path, sidecar=True):
        header = "sample_index," + ",".join(f"x{a + 1}" for a in range(self.dimension))
        with open(path, "w") as fh:
            fh.write(header + "\n")
            for i, row in enumerate(self.samples):
                fh.write(str(i) + "," + ",".join(repr(float(v)) for v in row) + "\n")
        if sidecar:
            side = {
                "scheme": self.scheme,
                "seed": int(self.seed),
                "t": float(self.t),
                "n": int(self.n),
                "dimension": int(self.dimension),
            }
            side.update({k: v for k, v in self.meta.items() if _jsonable(v)})
            with open(str(path) + ".json", "w") as fh:
                json.dump(side, fh, indent=2)
                fh.write("\n")
        return path


def _jsonable(v):
    return isinstance(v, (str, int, float, bool, list, dict, type(None)))


def sample_exact(mu, t, n, seed):
    """n independent samples of Z_t under mu, scheme exact_ray."""
    _validate(t, n)
    out = np.empty((n, mu.dimension))
    for lo, hi, rng in chunk_streams(seed, ("exact", mu.hash(), float(t)), n):
        out[lo:hi] = _draw_exact(mu, t, hi - lo, rng)
    return IncrementBatch(
        dimension=mu.dimension,
        t=float(t),
        scheme="exact_ray",
        seed=seed,
        samples=out,
        meta={"measure_hash": mu.hash()},
    )


def sample_decomposition(mu, t, n, seed):
    """n independent samples of Z_t via the big/small jump decomposition."""
    _validate(t, n)
    if mu.kind != "discrete":
        raise UnsupportedScheme(
            "decomposition sampling is implemented for discrete measures"
        )
    tables = small_jump_tables(mu)
    out = np.empty((n, mu.dimension))
    mean_counts = []
    for lo, hi, rng in chunk_streams(seed, ("decomp", mu.hash(), float(t)), n):
        block, counts = _draw_decomposition(mu, t, hi - lo, rng, tables)
        out[lo:hi] = block
        mean_counts.append(counts)
    return IncrementBatch(
        dimension=mu.dimension,
        t=float(t),
        scheme="decomposition",
        seed=seed,
        samples=out,
        meta={
            "measure_hash": mu.hash(),
            "mean_jump_count": float(np.mean(np.concatenate(mean_counts))),
            "expected_jump_count": TWO_OVER_PI * mu.total_mass,
        },
    )


def _validate(t, n):
    if n < 1:
        raise EmptyBatch(f"need n >= 1, got {n}")
    if not (t > 0 and np.isfinite(t)):
        raise ValueError(f"t must be positive and finite, got {t}")


def _draw_exact(mu, t, m, rng):
    """Raw (m, d) exact draw from one stream; used per chunk and per Euler step."""
    if mu.kind == "discrete":
        dirs, w = mu.pairs()
        u = rng.random((m, len(w)))
        c = np.tan(np.pi * (u - 0.5))
        return (c * (w * t)) @ dirs
    d = mu.dimension
    scale = t * mu.total_mass * sphere_mean_abs_cos(d)
    g = rng.standard_normal((m, d))
    nrm = rng.standard_normal((m, 1))
    return scale * g / np.abs(nrm)


def _draw_decomposition(mu, t, m, rng, tables):
    """Raw (m, d) decomposition draw plus per-sample total jump counts."""
    dirs, w = mu.pairs()
    out = np.zeros((m, mu.dimension))
    counts = np.zeros(m)
    for k, (theta, wk) in enumerate(zip(dirs, w)):
        lam = TWO_OVER_PI * wk
        kjump = rng.poisson(lam, m)
        total = int(kjump.sum())
        scalar = np.zeros(m)
        if total:
            owners = np.repeat(np.arange(m), kjump)
            radii = t / rng.random(total)
            signs = np.where(rng.random(total) < 0.5, 1.0, -1.0)
            scalar = np.bincount(owners, weights=signs * radii, minlength=m)
        xs, cdf = tables[k]
        small = t * np.interp(rng.random(m), cdf, xs)
        out += np.outer(scalar + small, theta)
        counts += kjump
    return out, counts


# -- small-jump inversion table -------------------------------------------

_table_cache: dict = {}


def small_jump_log_cf(u, w):
    """log E cos(u * M) for the unit-time small-jump part of one pair.

    M collects the jumps of size <= 1 along the pair's axis:
    log cf = (2/pi) * w * integral_0^1 (cos(ru) - 1) / r^2 dr
           = (2/pi) * w * (1 - cos u - |u| * Si(|u|)).
    """
    from scipy.special import sici

    a = np.abs(np.asarray(u, dtype=float))
    si, _ = sici(a)
    return TWO_OVER_PI * w * ((1.0 - np.cos(a)) - a * si)


def small_jump_table(w):
    """(x, cdf) arrays for inverse-CDF sampling of the unit-time law."""
    key = round(float(w), 14)
    if key in _table_cache:
        return _table_cache[key]
    from .density import invert_even_cf_1d, grid_cdf_1d

    u_decay = (36.0 + 2.0 * w) / w
    extent = max(40.0, 30.0 * math.sqrt(w), 6.0 * w)
    fld = invert_even_cf_1d(lambda u: small_jump_log_cf(u, w), u_decay, extent)
    xs = fld.spec.axes()[0]
    cdf = grid_cdf_1d(fld)
    # strictly increasing knots for np.interp's inverse lookup
    eps = np.arange(xs.size) * 1e-15
    table = (xs, np.minimum(cdf + eps, cdf[-1] + eps))
    _table_cache[key] = table
    return table


def small_jump_tables(mu):
    _, w = mu.pairs()
    return [small_jump_table(wk) for wk in w]
