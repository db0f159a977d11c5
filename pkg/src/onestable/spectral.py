"""Symmetric spectral measures on the unit sphere and the Levy exponent.

A measure mu is either a finite sum of atoms m_k * delta(theta_k) on
S^{d-1} or the uniform (isotropic) measure with a prescribed total mass.
The driving process is pinned down by the exponent

    Phi(lam) = integral of |<lam, theta>| mu(dtheta),

so that E exp(i<lam, Z_t>) = exp(-t * Phi(lam)).  Non-degeneracy is the
two-sided comparison (1/kappa)|lam| <= Phi(lam) <= kappa|lam|.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateMeasure,
    DimensionError,
    EmptyMeasure,
    InvalidDirection,
    UnsupportedDimension,
    UnsupportedScheme,
)

DEGENERACY_THRESHOLD = 1e-10
_MERGE_DECIMALS = 12


def sphere_mean_abs_cos(d):
    """Mean of |<u, theta>| over theta uniform on S^{d-1}, any fixed unit u."""
    return math.gamma(d / 2.0) / (math.sqrt(math.pi) * math.gamma((d + 1) / 2.0))


@dataclass(frozen=True)
class SpectralMeasure:
    """Symmetric spectral measure.

    For kind == "discrete", ``directions`` has one row per atom (both members
    of every +/- pair are stored) and ``masses`` the matching weights.  For
    kind == "isotropic" only ``dimension`` and ``total_mass`` are meaningful.
    """

    dimension: int
    kind: str
    directions: np.ndarray | None = None
    masses: np.ndarray | None = None
    total_mass: float = 0.0

    def __post_init__(self):
        if self.dimension < 1:
            raise DimensionError(f"dimension must be >= 1, got {self.dimension}")
        if self.kind not in ("discrete", "isotropic"):
            raise InvalidDirection(f"unknown measure kind {self.kind!r}")
        if self.kind == "discrete":
            dirs = np.ascontiguousarray(np.atleast_2d(self.directions), dtype=float)
            mass = np.ascontiguousarray(self.masses, dtype=float)
            if dirs.shape[0] == 0 or mass.size == 0:
                raise EmptyMeasure("discrete measure has no atoms")
            if dirs.shape[1] != self.dimension:
                raise DimensionError(
                    f"atom directions have dimension {dirs.shape[1]}, "
                    f"expected {self.dimension}"
                )
            if not np.isfinite(dirs).all() or not np.isfinite(mass).all():
                raise InvalidDirection("non-finite atom data")
            norms = np.linalg.norm(dirs, axis=1)
            if np.any(np.abs(norms - 1.0) > 1e-12):
                raise InvalidDirection("atom directions must be unit vectors")
            if np.any(mass <= 0):
                raise InvalidDirection("atom masses must be positive")
            _check_symmetry(dirs, mass)
            dirs.setflags(write=False)
            mass.setflags(write=False)
            object.__setattr__(self, "directions", dirs)
            object.__setattr__(self, "masses", mass)
            object.__setattr__(self, "total_mass", float(mass.sum()))
        else:
            if not (self.total_mass > 0 and np.isfinite(self.total_mass)):
                raise EmptyMeasure("isotropic measure needs positive total mass")
            object.__setattr__(self, "total_mass", float(self.total_mass))

    # -- derived views ----------------------------------------------------

    def pairs(self):
        """One representative direction per +/- pair and the pair's total mass.

        The exponent is sum_k w_k |<lam, theta_k>| over these pairs, and the
        exact sampler draws one Cauchy factor per pair with scale w_k * t.
        """
        if self.kind != "discrete":
            raise UnsupportedScheme("pairs() requires a discrete measure")
        reps = {}
        order = []
        for row, m in zip(self.directions, self.masses):
            key, sign = _canonical_key(row)
            if key not in reps:
                reps[key] = [sign * row, 0.0]
                order.append(key)
            reps[key][1] += m
        dirs = np.array([reps[k][0] for k in order])
        weights = np.array([reps[k][1] for k in order])
        return dirs, weights

    def angular_nodes(self, n_nodes=64):
        """Pair directions and weights; isotropic measures are atomized.

        For isotropic measures in d = 2 the circle is discretized with
        ``n_nodes`` equally spaced atoms (n_nodes // 2 pairs); in d = 3 a
        Fibonacci hemisphere with n_nodes**2 // 2 pairs is used.
        """
        if self.kind == "discrete":
            return self.pairs()
        d, c = self.dimension, self.total_mass
        if d == 1:
            return np.array([[1.0]]), np.array([c])
        if d == 2:
            p = max(n_nodes // 2, 4)
            ang = (np.arange(p) + 0.5) * math.pi / p
            dirs = np.column_stack([np.cos(ang), np.sin(ang)])
            return dirs, np.full(p, c / p)
        if d == 3:
            p = max(n_nodes * n_nodes // 2, 32)
            dirs = _fibonacci_sphere(2 * p)
            dirs = dirs[dirs[:, 2] > 0]  # one hemisphere, one rep per pair
            return dirs, np.full(len(dirs), c / len(dirs))
        raise UnsupportedDimension(f"angular nodes not implemented for d={d}")

    def hash(self):
        return hashlib.sha256(
            json.dumps(self.as_dict(), sort_keys=True).encode()
        ).hexdigest()

    def as_dict(self):
        if self.kind == "discrete":
            atoms = sorted(
                ([float(x) for x in row], float(m))
                for row, m in zip(self.directions, self.masses)
            )
            return {
                "dimension": self.dimension,
                "kind": "discrete",
                "atoms": [{"dir": d, "mass": m} for d, m in atoms],
                "total_mass": self.total_mass,
            }
        return {
            "dimension": self.dimension,
            "kind": "isotropic",
            "total_mass": self.total_mass,
        }


def _canonical_key(row):
    """Rounded tuple identifying a +/- pair, plus the sign mapping row onto it."""
    r = np.round(row, _MERGE_DECIMALS) + 0.0  # +0.0 turns -0.0 into 0.0
    sign = 1.0
    nz = np.nonzero(r)[0]
    if nz.size and r[nz[0]] < 0:
        r, sign = -r + 0.0, -1.0
    return tuple(r), sign


def _check_symmetry(dirs, mass):
    acc = {}
    for row, m in zip(dirs, mass):
        r = tuple(np.round(row, _MERGE_DECIMALS) + 0.0)
        acc[r] = acc.get(r, 0.0) + m
    for r, m in acc.items():
        neg = tuple(np.round(-np.array(r), _MERGE_DECIMALS) + 0.0)
        if neg not in acc or abs(acc[neg] - m) > 1e-12 * max(1.0, m):
            raise InvalidDirection(
                "measure is not symmetric: atom at "
                f"{r} lacks a matching atom at the antipode"
            )


def symmetrize(raw_atoms, dimension=None):
    """Build a symmetric discrete measure from raw (direction, mass) pairs.

    Directions are normalized to unit length, each atom's mass is split
    evenly between theta and -theta, and coincident directions (after
    rounding to 12 decimals) are merged.  Returns the measure and a flag
    telling whether symmetrization changed the raw input.
    """
    atoms = list(raw_atoms)
    if not atoms:
        raise EmptyMeasure("no atoms supplied")
    first = np.asarray(atoms[0][0], dtype=float).ravel()
    d = dimension if dimension is not None else first.size
    acc = {}
    order = []
    raw_acc = {}
    for direction, m in atoms:
        v = np.asarray(direction, dtype=float).ravel()
        if v.size != d:
            raise DimensionError(f"direction {v} has dimension {v.size}, expected {d}")
        if not np.isfinite(v).all():
            raise InvalidDirection(f"non-finite direction {direction}")
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            raise InvalidDirection("zero direction has no angular part")
        if not (np.isfinite(m) and m > 0):
            raise InvalidDirection(f"mass must be positive and finite, got {m}")
        u = v / nrm
        for sign in (1.0, -1.0):
            key = tuple(np.round(sign * u, _MERGE_DECIMALS) + 0.0)
            if key not in acc:
                acc[key] = 0.0
                order.append(key)
            acc[key] += 0.5 * m
        rk = tuple(np.round(u, _MERGE_DECIMALS) + 0.0)
        raw_acc[rk] = raw_acc.get(rk, 0.0) + m
    order.sort()
    dirs = np.array([np.array(k) / np.linalg.norm(k) for k in order])
    masses = np.array([acc[k] for k in order])
    changed = len(order) != len(raw_acc) or any(
        abs(acc[k] - raw_acc.get(k, 0.0)) > 1e-12 * max(1.0, acc[k]) for k in order
    )
    measure = SpectralMeasure(dimension=d, kind="discrete", directions=dirs, masses=masses)
    return measure, changed


def cylindrical(d):
    """Auxiliary-function measure: atoms +/- e_i with mass 1/2 each.

    The exponent is the l1 norm, Phi(lam) = sum_i |lam_i|, so at t = 1 the
    coordinates of Z_1 are independent standard Cauchy.
    """
    eye = np.eye(d)
    dirs = np.vstack([eye, -eye])
    masses = np.full(2 * d, 0.5)
    return SpectralMeasure(dimension=d, kind="discrete", directions=dirs, masses=masses)


def isotropic(d, total_mass):
    return SpectralMeasure(dimension=d, kind="isotropic", total_mass=total_mass)


def levy_exponent(mu, lam):
    """Phi(lam) for a single vector or an array of shape (..., d)."""
    arr = np.asarray(lam, dtype=float)
    if arr.shape == () and mu.dimension == 1:
        arr = arr.reshape(1)
    if arr.shape[-1] != mu.dimension:
        raise DimensionError(
            f"lambda has dimension {arr.shape[-1]}, measure has {mu.dimension}"
        )
    if mu.kind == "discrete":
        proj = np.abs(arr @ mu.directions.T)
        return proj @ mu.masses
    return mu.total_mass * sphere_mean_abs_cos(mu.dimension) * np.linalg.norm(arr, axis=-1)


@dataclass(frozen=True)
class NondegeneracyReport:
    kappa: float
    min_ratio: float
    max_ratio: float
    grid_points: int


_kappa_cache: dict = {}


def nondegeneracy_kappa(mu, resolution=512):
    """Extremes of Phi over the unit sphere and the comparison constant kappa.

    A quasi-uniform grid with at least resolution**(d-1) points seeds the
    search; for discrete measures both extrema are then refined locally
    (golden section in d = 2, coordinate descent on spherical angles in
    d = 3) to parameter tolerance 1e-10.  Raises DegenerateMeasure when the
    refined minimum ratio falls at or below 1e-10.
    """
    if resolution < 8:
        raise ValueError(f"resolution must be >= 8, got {resolution}")
    key = (mu.hash(), resolution)
    if key in _kappa_cache:
        return _kappa_cache[key]

    d = mu.dimension
    if mu.kind == "isotropic":
        ratio = mu.total_mass * sphere_mean_abs_cos(d)
        report = _finish(ratio, ratio, 1 if d == 1 else resolution ** (d - 1))
    elif d == 1:
        val = float(levy_exponent(mu, np.array([1.0])))
        report = _finish(val, val, 2)
    elif d == 2:
        report = _kappa_2d(mu, resolution)
    elif d == 3:
        report = _kappa_3d(mu, resolution)
    else:
        raise UnsupportedDimension(f"kappa search implemented for d <= 3, got d={d}")
    _kappa_cache[key] = report
    return report


def _finish(min_ratio, max_ratio, grid_points):
    if min_ratio <= DEGENERACY_THRESHOLD:
        raise DegenerateMeasure(
            f"exponent minimum {min_ratio:.3e} over the sphere is at or below "
            f"{DEGENERACY_THRESHOLD:.0e}: measure is degenerate"
        )
    kappa = max(max_ratio, 1.0 / min_ratio)
    return NondegeneracyReport(
        kappa=float(kappa),
        min_ratio=float(min_ratio),
        max_ratio=float(max_ratio),
        grid_points=int(grid_points),
    )


def _kappa_2d(mu, resolution):
    n = resolution
    ang = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    vals = levy_exponent(mu, np.column_stack([np.cos(ang), np.sin(ang)]))

    def f(a):
        return float(levy_exponent(mu, np.array([math.cos(a), math.sin(a)])))

    h = 2.0 * math.pi / n
    i_min = int(np.argmin(vals))
    i_max = int(np.argmax(vals))
    _, vmin = _golden(f, ang[i_min] - h, ang[i_min] + h)
    _, vmax = _golden(lambda a: -f(a), ang[i_max] - h, ang[i_max] + h)
    return _finish(vmin, -vmax, n)


def _kappa_3d(mu, resolution):
    n = resolution * resolution
    pts = _fibonacci_sphere(n)
    vals = levy_exponent(mu, pts)

    def f(angles):
        th, ph = angles
        u = np.array(
            [math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)]
        )
        return float(levy_exponent(mu, u))

    step = 2.0 * math.sqrt(4.0 * math.pi / n)
    vmin = _descend(f, pts[int(np.argmin(vals))], step, minimize=True)
    vmax = _descend(f, pts[int(np.argmax(vals))], step, minimize=False)
    return _finish(vmin, vmax, n)


def _descend(f, start, step, minimize, sweeps=6):
    th = math.acos(np.clip(start[2], -1.0, 1.0))
    ph = math.atan2(start[1], start[0])
    g = (lambda a: f(a)) if minimize else (lambda a: -f(a))
    best = g((th, ph))
    width = step
    for _ in range(sweeps):
        th, best = _golden(lambda t: g((t, ph)), th - width, th + width)
        ph, best = _golden(lambda p: g((th, p)), ph - width, ph + width)
        width = max(width / 8.0, 1e-6)
    return best if minimize else -best


_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden(f, a, b, tol=1e-10):
    """Golden-section minimizer; returns (argmin, min)."""
    x1 = b - _PHI * (b - a)
    x2 = a + _PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _PHI * (b - a)
            f2 = f(x2)
    x = 0.5 * (a + b)
    return x, min(f1, f2, f(x))


def _fibonacci_sphere(n):
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    golden = math.pi * (3.0 - math.sqrt(5.0))
    th = golden * i
    pts = np.column_stack([r * np.cos(th), r * np.sin(th), z])
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


# -- JSON interface -------------------------------------------------------


def load_measure(source):
    """Read a measure from a JSON file path, JSON string, or dict.

    Discrete atom lists are symmetrized on load; the returned flag reports
    whether that changed the stored atoms.
    """
    if isinstance(source, dict):
        doc = source
    else:
        text = None
        try:
            with open(source) as fh:
                text = fh.read()
        except (OSError, TypeError):
            text = source
        doc = json.loads(text)
    if "dimension" not in doc or "kind" not in doc:
        raise InvalidDirection("measure document needs 'dimension' and 'kind'")
    d = int(doc["dimension"])
    if doc["kind"] == "isotropic":
        return isotropic(d, float(doc["total_mass"])), False
    if doc["kind"] != "discrete":
        raise InvalidDirection(f"unknown measure kind {doc['kind']!r}")
    atoms = doc.get("atoms", [])
    if not atoms:
        raise EmptyMeasure("measure document has an empty atom list")
    raw = [(a["dir"], a["mass"]) for a in atoms]
    measure, changed = symmetrize(raw, dimension=d)
    if "total_mass" in doc and abs(measure.total_mass - doc["total_mass"]) > 1e-9 * max(
        1.0, measure.total_mass
    ):
        changed = True
    return measure, changed


def save_measure(mu, path):
    with open(path, "w") as fh:
        json.dump(mu.as_dict(), fh, indent=2)
        fh.write("\n")
