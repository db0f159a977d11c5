"""Bounded continuous drift fields b(x) with frozen-center decompositions.

Each drift carries the constant reference vector b0 and the deviation
radius epsilon = sup_x |b(x) - b0|; the resolvent solver only sees the
drift through this pair plus the evaluator.  Built-in profiles are smooth
or C^1 and componentwise saturating, so epsilon is exact, not estimated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, EvaluationError


@dataclass(frozen=True)
class DriftSpec:
    name: str
    dimension: int
    evaluator: object
    b0: np.ndarray
    epsilon: float
    bound: float
    params: dict = field(default_factory=dict)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        squeeze = x.ndim == 1
        pts = np.atleast_2d(x)
        if pts.shape[-1] != self.dimension:
            raise DimensionError("point dimension mismatch")
        out = np.asarray(self.evaluator(pts), dtype=float)
        if out.shape != pts.shape:
            raise EvaluationError(f"drift returned shape {out.shape}, expected {pts.shape}")
        return out[0] if squeeze else out

    def as_dict(self):
        return {
            "name": self.name,
            "dimension": self.dimension,
            "b0": [float(v) for v in self.b0],
            "epsilon": float(self.epsilon),
            "bound": float(self.bound),
            "params": {k: float(v) for k, v in self.params.items()},
        }


def zero(dimension):
    return constant(np.zeros(dimension))


def constant(vector):
    v = np.atleast_1d(np.asarray(vector, dtype=float))

    def ev(pts):
        return np.broadcast_to(v, pts.shape).copy()

    return DriftSpec(
        name="const",
        dimension=v.size,
        evaluator=ev,
        b0=v.copy(),
        epsilon=0.0,
        bound=float(np.linalg.norm(v)),
        params={f"v{i}": v[i] for i in range(v.size)},
    )


def tanh_profile(amplitude=0.1, scale=1.0, dimension=1):
    """b_i(x) = amplitude * tanh(x_i / scale)."""
    if scale <= 0:
        raise ValueError("scale must be positive")

    def ev(pts):
        return amplitude * np.tanh(pts / scale)

    eps = abs(amplitude) * np.sqrt(dimension)
    return DriftSpec(
        name="tanh",
        dimension=dimension,
        evaluator=ev,
        b0=np.zeros(dimension),
        epsilon=float(eps),
        bound=float(eps),
        params={"amp": amplitude, "scale": scale},
    )


def sin_profile(amplitude=0.2, dimension=2):
    """b_i(x) = amplitude * sin(x_{i+1 mod d}); coordinates coupled for d > 1."""

    def ev(pts):
        return amplitude * np.sin(np.roll(pts, -1, axis=-1))

    eps = abs(amplitude) * np.sqrt(dimension)
    return DriftSpec(
        name="sin",
        dimension=dimension,
        evaluator=ev,
        b0=np.zeros(dimension),
        epsilon=float(eps),
        bound=float(eps),
        params={"amp": amplitude},
    )


def piecewise_smooth(amplitude=0.1, scale=1.0, dimension=1):
    """Componentwise saturating cubic: C^1, linear near 0, flat beyond scale."""
    if scale <= 0:
        raise ValueError("scale must be positive")

    def ev(pts):
        u = np.clip(pts / scale, -1.0, 1.0)
        return amplitude * u * (1.0 - u * u / 3.0) * 1.5

    # saturates at amplitude * 1.5 * (2/3) = amplitude
    eps = abs(amplitude) * np.sqrt(dimension)
    return DriftSpec(
        name="pw",
        dimension=dimension,
        evaluator=ev,
        b0=np.zeros(dimension),
        epsilon=float(eps),
        bound=float(eps),
        params={"amp": amplitude, "scale": scale},
    )


def from_callable(fn, dimension, name="custom", halfwidth=30.0, n=4096, seed=2):
    """Wrap a raw callable; b0 and epsilon are estimated on probe points.

    The probe lattice is deterministic, so two runs wrap identically.  The
    estimate is only as good as the probe coverage; prefer the closed-form
    profiles when epsilon enters an acceptance bound.
    """
    from .rng import substream

    rng = substream(seed, "drift-probe", name)
    pts = halfwidth * 2.0 * (rng.random((n, dimension)) - 0.5)
    pts = np.vstack([pts, np.zeros(dimension)])
    vals = np.asarray(fn(pts), dtype=float)
    if vals.shape != pts.shape:
        raise EvaluationError("callable must map (n, d) to (n, d)")
    if not np.all(np.isfinite(vals)):
        raise EvaluationError("drift callable produced non-finite values")
    b0 = 0.5 * (vals.min(axis=0) + vals.max(axis=0))
    eps = float(np.max(np.linalg.norm(vals - b0, axis=1)))
    bound = float(np.max(np.linalg.norm(vals, axis=1)))

    def ev(p):
        return np.asarray(fn(p), dtype=float)

    return DriftSpec(
        name=name,
        dimension=dimension,
        evaluator=ev,
        b0=b0,
        epsilon=eps,
        bound=bound,
    )


def drift_from_spec(text, dimension):
    """Parse the CLI micro-format, e.g. "tanh:amp=0.1,scale=1" or "zero".

    Recognised names: zero, const (v=c or v=c1/c2/...), tanh (amp, scale),
    sin (amp), pw (amp, scale).
    """
    text = text.strip()
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    kv = {}
    if rest:
        for item in rest.split(","):
            if not item.strip():
                continue
            key, sep, val = item.partition("=")
            if not sep:
                raise ValueError(f"bad drift parameter {item!r}, expected key=value")
            kv[key.strip()] = val.strip()

    def fval(key, default):
        try:
            return float(kv.pop(key, default))
        except ValueError as exc:
            raise ValueError(f"bad value for drift parameter {key!r}") from exc

    if name == "zero":
        out = zero(dimension)
    elif name == "const":
        raw = kv.pop("v", "0")
        parts = [float(p) for p in raw.split("/")]
        if len(parts) == 1:
            parts = parts * dimension
        if len(parts) != dimension:
            raise ValueError(f"const drift needs 1 or {dimension} components")
        out = constant(parts)
    elif name == "tanh":
        out = tanh_profile(fval("amp", 0.1), fval("scale", 1.0), dimension)
    elif name == "sin":
        out = sin_profile(fval("amp", 0.2), dimension)
    elif name == "pw":
        out = piecewise_smooth(fval("amp", 0.1), fval("scale", 1.0), dimension)
    else:
        raise ValueError(f"unknown drift profile {name!r}")
    if kv:
        raise ValueError(f"unused drift parameters: {sorted(kv)}")
    return out
