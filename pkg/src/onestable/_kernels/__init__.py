"""Backend selection for the batched generator quadrature.

The compiled extension is preferred when importable; the numpy fallback
gives identical results (to round-off) and keeps the package usable from a
source checkout without a compiler.  Set ONESTABLE_BACKEND=python to force
the fallback, or =c to fail loudly when the extension is missing.
"""

from __future__ import annotations

import os

from . import _pykern

_choice = os.environ.get("ONESTABLE_BACKEND", "auto").lower()
if _choice not in ("auto", "c", "python"):
    raise ValueError(f"ONESTABLE_BACKEND must be auto, c or python, got {_choice!r}")

_impl = _pykern
if _choice in ("auto", "c"):
    try:
        from . import _ckern as _impl_c
        _impl = _impl_c
    except ImportError:
        if _choice == "c":
            raise

BACKEND = _impl.BACKEND


def generator_batch(points, family, params, dirs, weights, rho, rho_w, rho_min):
    return _impl.generator_batch(points, family, params, dirs, weights, rho, rho_w, rho_min)


def get_backend(name):
    """Explicit backend lookup, used by parity tests and the benchmark."""
    if name == "python":
        return _pykern
    if name == "c":
        from . import _ckern
        return _ckern
    raise ValueError(f"unknown backend {name!r}")
