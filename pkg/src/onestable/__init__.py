"""Numerics for d-dimensional symmetric Cauchy-type (1-stable) processes.

The driving process has characteristic function exp(-t * Phi(lam)) with
Phi(lam) = sum_k w_k |<lam, theta_k>| built from a finite symmetric spectral
measure on the sphere; the measure may be fully singular (a handful of rays).
The package provides exact and series samplers, densities by Fourier
inversion, the integro-differential generator on explicit test functions,
a frozen-coefficient resolvent solved by a Neumann series for bounded
continuous drifts, and Monte Carlo cross-checks of all of the above.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND, get_backend
from .density import (
    auto_grid,
    cdf_callable_1d,
    density_grid,
    density_point,
    derivative_scaling_probe,
    grid_cdf_1d,
    invert_even_cf_1d,
    project_measure,
    required_nyquist,
)
from .drifts import (
    DriftSpec,
    constant,
    drift_from_spec,
    from_callable,
    piecewise_smooth,
    sin_profile,
    tanh_profile,
    zero,
)
from .errors import (
    BoundarySupportError,
    ContractionFailure,
    DegenerateMeasure,
    DimensionError,
    EvaluationError,
    GridError,
    GridTooCoarse,
    MaxIterExceeded,
    OneStableError,
    UnsupportedDimension,
    UnsupportedScheme,
)
from .generator import (
    QuadSpec,
    TestFunction,
    apply_L,
    apply_L_batch,
    apply_L_with_bound,
    apply_full,
    apply_full_batch,
    gaussian_bump,
    poly_window,
    tail_bound,
    trig,
)
from .grid import GridField, GridSpec, centered_spec
from .mcverify import (
    SimConfig,
    character_check,
    krylov_ratio_probe,
    martingale_residual,
    resolvent_mc,
    simulate_terminal,
    simulate_terminal_pair,
    two_of_three,
    weak_uniqueness_probe,
)
from .resolvent import (
    MultiplierReport,
    ResolventSolution,
    TimeQuad,
    deviation_integral,
    multiplier_sup,
    neumann_solve,
    proxy_gradient,
    proxy_resolvent,
    random_test_field,
    remainder,
    residual,
)
from .sampler import (
    IncrementBatch,
    sample_decomposition,
    sample_exact,
    small_jump_table,
)
from .spectral import (
    SpectralMeasure,
    cylindrical,
    isotropic,
    levy_exponent,
    load_measure,
    nondegeneracy_kappa,
    save_measure,
    symmetrize,
)

__all__ = [
    "BACKEND",
    "BoundarySupportError",
    "ContractionFailure",
    "DegenerateMeasure",
    "DimensionError",
    "DriftSpec",
    "EvaluationError",
    "GridError",
    "GridField",
    "GridSpec",
    "GridTooCoarse",
    "IncrementBatch",
    "MaxIterExceeded",
    "MultiplierReport",
    "OneStableError",
    "QuadSpec",
    "ResolventSolution",
    "SimConfig",
    "SpectralMeasure",
    "TestFunction",
    "TimeQuad",
    "UnsupportedDimension",
    "UnsupportedScheme",
    "apply_L",
    "apply_L_batch",
    "apply_L_with_bound",
    "apply_full",
    "apply_full_batch",
    "auto_grid",
    "cdf_callable_1d",
    "centered_spec",
    "character_check",
    "constant",
    "cylindrical",
    "density_grid",
    "density_point",
    "derivative_scaling_probe",
    "deviation_integral",
    "drift_from_spec",
    "from_callable",
    "gaussian_bump",
    "get_backend",
    "grid_cdf_1d",
    "invert_even_cf_1d",
    "isotropic",
    "krylov_ratio_probe",
    "levy_exponent",
    "load_measure",
    "martingale_residual",
    "multiplier_sup",
    "neumann_solve",
    "nondegeneracy_kappa",
    "piecewise_smooth",
    "poly_window",
    "project_measure",
    "proxy_gradient",
    "proxy_resolvent",
    "random_test_field",
    "remainder",
    "required_nyquist",
    "resolvent_mc",
    "residual",
    "sample_decomposition",
    "sample_exact",
    "save_measure",
    "simulate_terminal",
    "simulate_terminal_pair",
    "sin_profile",
    "small_jump_table",
    "symmetrize",
    "tail_bound",
    "tanh_profile",
    "trig",
    "two_of_three",
    "weak_uniqueness_probe",
    "zero",
]
