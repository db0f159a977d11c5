"""Regular-grid scalar fields with binary/CSV export.

A GridField stores values on the lattice x_j = origin + j * spacing (axes
independent, C order).  Periodic Fourier operations treat the box
[origin, origin + shape * spacing) as one period per axis.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import GridError, UnsupportedDimension


@dataclass(frozen=True)
class GridSpec:
    """Layout of a regular grid: origin, spacing and points per axis."""

    origin: tuple
    spacing: tuple
    shape: tuple

    def __post_init__(self):
        origin = tuple(float(x) for x in np.atleast_1d(self.origin))
        spacing = tuple(float(x) for x in np.atleast_1d(self.spacing))
        shape = tuple(int(n) for n in np.atleast_1d(self.shape))
        if not (len(origin) == len(spacing) == len(shape)):
            raise GridError("origin, spacing and shape must have equal length")
        d = len(shape)
        if d < 1 or d > 3:
            raise UnsupportedDimension(f"grids support 1 <= d <= 3, got {d}")
        if any(h <= 0 or not np.isfinite(h) for h in spacing):
            raise GridError("grid spacing must be positive and finite")
        if any(n < 2 for n in shape):
            raise GridError("each axis needs at least 2 points")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "shape", shape)

    @property
    def dimension(self):
        return len(self.shape)

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    @property
    def extents(self):
        return tuple(n * h for n, h in zip(self.shape, self.spacing))

    def axes(self):
        return [
            o + h * np.arange(n)
            for o, h, n in zip(self.origin, self.spacing, self.shape)
        ]

    def mesh(self, sparse=False):
        return np.meshgrid(*self.axes(), indexing="ij", sparse=sparse)

    def points(self):
        """All grid points flattened to an (N, d) array in C order."""
        m = self.mesh()
        return np.column_stack([a.ravel() for a in m])

    def freq_axes(self):
        """Angular frequency axis per dimension (2*pi*fftfreq ordering)."""
        return [
            2.0 * np.pi * np.fft.fftfreq(n, d=h)
            for n, h in zip(self.shape, self.spacing)
        ]

    def freq_mesh(self, sparse=False):
        return np.meshgrid(*self.freq_axes(), indexing="ij", sparse=sparse)

    def nyquist_radius(self):
        """Largest frequency magnitude guaranteed covered on every axis."""
        return min(np.pi / h for h in self.spacing)

    def as_dict(self):
        return {
            "origin": list(self.origin),
            "spacing": list(self.spacing),
            "shape": list(self.shape),
        }


def centered_spec(extent, spacing, d=1):
    """Symmetric grid of the given physical extent per axis."""
    if np.isscalar(extent):
        extent = (extent,) * d
    if np.isscalar(spacing):
        spacing = (spacing,) * d
    shape = tuple(int(round(L / h)) for L, h in zip(extent, spacing))
    origin = tuple(-(n // 2) * h for n, h in zip(shape, spacing))
    return GridSpec(origin=origin, spacing=spacing, shape=shape)


@dataclass
class GridField:
    spec: GridSpec
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != self.spec.shape:
            raise GridError(
                f"value shape {vals.shape} does not match grid shape {self.spec.shape}"
            )
        self.values = vals

    @property
    def dimension(self):
        return self.spec.dimension

    def like(self, values, **meta):
        return GridField(spec=self.spec, values=values, meta=dict(meta))

    def norm(self, p=2, interior_margin=0.0):
        """Discrete L^p norm, optionally restricted to the grid interior.

        interior_margin is the fraction of points trimmed from each side of
        every axis before the norm is taken.
        """
        v = self.values[self.interior_slices(interior_margin)]
        if np.isinf(p):
            return float(np.max(np.abs(v)))
        vol = self.spec.cell_volume
        return float((np.sum(np.abs(v) ** p) * vol) ** (1.0 / p))

    def interior_slices(self, margin):
        if margin <= 0:
            return tuple(slice(None) for _ in self.spec.shape)
        out = []
        for n in self.spec.shape:
            k = int(margin * n)
            out.append(slice(k, n - k if n - k > k else k + 1))
        return tuple(out)

    def value_at(self, point):
        """Value at the grid point nearest to `point` (must lie on the grid)."""
        idx = []
        for x, o, h, n in zip(
            np.atleast_1d(point), self.spec.origin, self.spec.spacing, self.spec.shape
        ):
            j = int(round((x - o) / h))
            if not (0 <= j < n) or abs(o + j * h - x) > 1e-9 * max(1.0, abs(x)):
                raise GridError(f"point {point} is not on the grid")
            idx.append(j)
        return self.values[tuple(idx)]

    def interp(self, points):
        """Multilinear interpolation at an (N, d) array of points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        coords = [
            (pts[:, a] - self.spec.origin[a]) / self.spec.spacing[a]
            for a in range(self.dimension)
        ]
        from scipy.ndimage import map_coordinates

        return map_coordinates(
            self.values, np.array(coords), order=1, mode="nearest"
        )

    # -- export ------------------------------------------------------------

    def to_binary(self, path_prefix):
        """Write <prefix>.f64 (flat little-endian float64, C order) + <prefix>.json."""
        data = np.ascontiguousarray(self.values, dtype="<f8")
        bin_path = f"{path_prefix}.f64"
        hdr_path = f"{path_prefix}.json"
        data.tofile(bin_path)
        header = dict(self.spec.as_dict())
        header.update({"dtype": "<f8", "order": "C", "meta": _json_safe(self.meta)})
        with open(hdr_path, "w") as fh:
            json.dump(header, fh, indent=2)
            fh.write("\n")
        return bin_path, hdr_path

    @classmethod
    def from_binary(cls, path_prefix):
        with open(f"{path_prefix}.json") as fh:
            header = json.load(fh)
        spec = GridSpec(
            origin=header["origin"], spacing=header["spacing"], shape=header["shape"]
        )
        data = np.fromfile(f"{path_prefix}.f64", dtype="<f8").reshape(spec.shape)
        return cls(spec=spec, values=data, meta=header.get("meta", {}))

    def to_csv(self, path):
        if self.dimension != 1:
            raise UnsupportedDimension("CSV export is for one-dimensional fields")
        xs = self.spec.axes()[0]
        with open(path, "w") as fh:
            fh.write("x,value\n")
            for x, v in zip(xs, self.values):
                fh.write(f"{x!r},{v!r}\n")


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj
