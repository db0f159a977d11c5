import dataclasses
import math

import numpy as np
import pytest

from onestable import (
    ContractionFailure,
    BoundarySupportError,
    GridError,
    GridField,
    MaxIterExceeded,
    TimeQuad,
    UnsupportedDimension,
    centered_spec,
    constant,
    cylindrical,
    deviation_integral,
    multiplier_sup,
    neumann_solve,
    proxy_gradient,
    proxy_resolvent,
    random_test_field,
    remainder,
    residual,
    tanh_profile,
    zero,
)

import oracles


def _windowed_cos(spec, flat=650.0, ramp_end=850.0):
    # cos(x) under a sin^2 taper: exactly 1 on |x| <= flat, zero beyond
    # ramp_end, so the support check passes and boundary wrap is negligible.
    x = spec.axes()[0]
    r = np.clip((np.abs(x) - flat) / (ramp_end - flat), 0.0, 1.0)
    win = np.cos(0.5 * math.pi * r) ** 2
    win[np.abs(x) >= ramp_end] = 0.0
    return GridField(spec=spec, values=np.cos(x) * win)


@pytest.fixture(scope="module")
def wide_spec():
    return centered_spec(1751.04, 0.05, 1)


@pytest.fixture(scope="module")
def cos_field(wide_spec):
    return _windowed_cos(wide_spec)


def test_proxy_on_windowed_character(cauchy1, wide_spec, cos_field):
    # For f = cos(x) the exact resolvent with Phi(z) = |z| is cos(x)/(lam+1).
    # The window is flat to |x| = 650 so the interior sees the pure character.
    u = proxy_resolvent(cos_field, 1.0, 0.0, cauchy1)
    x = wide_spec.axes()[0]
    core = np.abs(x) <= 50.0
    err = np.max(np.abs(u.values[core] - 0.5 * np.cos(x[core])))
    assert err < 1e-6
    assert u.meta["imag_max"] < 1e-9


def test_proxy_lambda_scaling(cauchy1, cos_field, wide_spec):
    u = proxy_resolvent(cos_field, 3.0, 0.0, cauchy1)
    x = wide_spec.axes()[0]
    core = np.abs(x) <= 50.0
    assert np.max(np.abs(u.values[core] - 0.25 * np.cos(x[core]))) < 1e-6


def test_proxy_gradient_matches_derivative(cauchy1, cos_field, wide_spec):
    grads = proxy_gradient(cos_field, 1.0, 0.0, cauchy1)
    assert len(grads) == 1
    x = wide_spec.axes()[0]
    core = np.abs(x) <= 50.0
    err = np.max(np.abs(grads[0].values[core] + 0.5 * np.sin(x[core])))
    assert err < 1e-6


def test_proxy_drift_rotates_phase(cauchy1, cos_field, wide_spec):
    # Frozen drift b0 enters the symbol as -i zeta b0, so on the character
    # e^{ix} the answer is Re[e^{ix}/(2 - 0.3i)].
    b0 = 0.3
    u = proxy_resolvent(cos_field, 1.0, b0, cauchy1)
    x = wide_spec.axes()[0]
    core = np.abs(x) <= 50.0
    expect = (2.0 * np.cos(x[core]) - b0 * np.sin(x[core])) / (4.0 + b0 * b0)
    assert np.max(np.abs(u.values[core] - expect)) < 1e-6


def test_proxy_rejects_uncompact_field(cauchy1):
    spec = centered_spec(20.0, 0.1, 1)
    flat = GridField(spec=spec, values=np.ones(spec.shape))
    with pytest.raises(BoundarySupportError):
        proxy_resolvent(flat, 1.0, 0.0, cauchy1)


def test_proxy_rejects_nonpositive_lambda(cauchy1):
    spec = centered_spec(20.0, 0.1, 1)
    f = random_test_field(spec, seed=1)
    with pytest.raises(ValueError):
        proxy_resolvent(f, 0.0, 0.0, cauchy1)


def test_remainder_vanishes_for_frozen_drift(cauchy1):
    spec = centered_spec(40.0, 0.1, 1)
    f = random_test_field(spec, seed=5)
    drift = constant([0.4])
    rem = remainder(f, 1.0, drift, cauchy1)
    assert np.max(np.abs(rem.values)) == 0.0


def test_remainder_matches_manual_product(cauchy1):
    spec = centered_spec(40.0, 0.1, 1)
    f = random_test_field(spec, seed=6)
    drift = tanh_profile(amplitude=0.1, scale=1.0, dimension=1)
    rem = remainder(f, 1.0, drift, cauchy1)
    grad = proxy_gradient(f, 1.0, drift.b0, cauchy1)[0]
    pts = spec.points()
    bdev = drift(pts)[:, 0].reshape(spec.shape) - drift.b0[0]
    assert np.allclose(rem.values, bdev * grad.values, atol=1e-14)


def test_proxy_solves_frozen_equation_exactly(cauchy1):
    # With b identically b0 the proxy inverse is the discrete inverse, so the
    # residual is pure round-off.
    spec = centered_spec(40.0, 0.1, 1)
    f = random_test_field(spec, seed=7)
    drift = constant([0.25])
    u = proxy_resolvent(f, 1.0, drift.b0, cauchy1)
    res = residual(u, f, 1.0, drift, cauchy1)
    assert res < 1e-10 * f.norm(p=2)


def test_residual_requires_matching_grids(cauchy1):
    f = random_test_field(centered_spec(40.0, 0.1, 1), seed=2)
    u = random_test_field(centered_spec(40.0, 0.2, 1), seed=2)
    with pytest.raises(GridError):
        residual(u, f, 1.0, zero(1), cauchy1)


def test_multiplier_sup_within_kappa(cauchy1, cyl2):
    spec1 = centered_spec(80.0, 0.05, 1)
    spec2 = centered_spec(40.0, 0.16, 2)
    for lam in (1.0, 5.0):
        r1 = multiplier_sup(cauchy1, lam, 0.0, spec1)
        assert r1.sup_gradient_ratio <= 1.0 + 1e-12
        assert r1.sup_gradient_ratio > 0.9  # tight near the Nyquist corner
        assert r1.sup_multiplier <= 1.0 / lam + 1e-12
        r2 = multiplier_sup(cyl2, lam, (0.0, 0.0), spec2)
        assert r2.sup_gradient_ratio <= math.sqrt(2.0) + 1e-12


def test_gradient_energy_bounded_by_kappa(cyl2):
    spec = centered_spec(40.0, 0.16, 2)
    kap = math.sqrt(2.0)
    for seed in range(6):
        f = random_test_field(spec, seed=seed)
        grads = proxy_gradient(f, 1.0, (0.0, 0.0), cyl2)
        g2 = sum(g.values**2 for g in grads)
        gnorm = GridField(spec=spec, values=np.sqrt(g2)).norm(p=2)
        assert gnorm <= kap * f.norm(p=2) * (1.0 + 1e-9)


def test_neumann_frozen_drift_single_term(cauchy1):
    spec = centered_spec(400.0, 0.05, 1)
    x = spec.axes()[0]
    f = GridField(spec=spec, values=np.exp(-0.5 * x * x))
    sol = neumann_solve(f, 1.0, constant([0.2]), cauchy1, tol=1e-8)
    assert sol.iterations == 1
    assert sol.epsilon_used == 0.0
    assert sol.r_hat == 0.0
    proxy = proxy_resolvent(f, 1.0, 0.2, cauchy1)
    assert np.allclose(sol.u.values, proxy.values, atol=1e-13)
    assert sol.final_residual < 1e-10 * f.norm(p=2)


def test_neumann_tanh_drift_converges(cauchy1):
    spec = centered_spec(400.0, 0.05, 1)
    x = spec.axes()[0]
    f = GridField(spec=spec, values=np.exp(-0.5 * x * x))
    drift = tanh_profile(amplitude=0.1, scale=1.0, dimension=1)
    sol = neumann_solve(f, 1.0, drift, cauchy1, tol=1e-5)
    assert 2 <= sol.iterations <= 10
    assert sol.r_hat < 0.2
    assert sol.final_residual < 1e-4 * f.norm(p=2)
    # history tracks partial-sum residuals and should decay monotonically
    hist = sol.partial_sums_residuals
    assert len(hist) == sol.iterations - 1
    assert all(b < a for a, b in zip(hist, hist[1:]))
    # the recorded residual is reproducible with the standalone evaluator
    check = residual(sol.u, f, 1.0, drift, cauchy1)
    assert abs(check - sol.final_residual) < 1e-12 * f.norm(p=2)
    rep = sol.report()
    assert rep["lambda"] == 1.0
    assert rep["iterations"] == sol.iterations
    assert len(rep["term_norms"]) == sol.iterations + 1


def test_neumann_freeze_point_is_immaterial(cauchy1):
    # Re-freezing the proxy at a shifted b0 changes the split, not the
    # solution: both runs satisfy the same discrete equation to tol.
    spec = centered_spec(400.0, 0.05, 1)
    x = spec.axes()[0]
    f = GridField(spec=spec, values=np.exp(-0.5 * x * x))
    drift = tanh_profile(amplitude=0.1, scale=1.0, dimension=1)
    moved = dataclasses.replace(
        drift, b0=np.array([0.05]), epsilon=drift.epsilon + 0.05
    )
    sol_a = neumann_solve(f, 1.0, drift, cauchy1, tol=1e-8, max_iter=80)
    sol_b = neumann_solve(f, 1.0, moved, cauchy1, tol=1e-8, max_iter=80)
    gap = GridField(spec=spec, values=sol_a.u.values - sol_b.u.values).norm(p=2)
    assert gap < 1e-6 * f.norm(p=2)


def test_neumann_two_dimensional_smoke(cyl2):
    from onestable import sin_profile

    spec = centered_spec(80.0, 0.16, 2)
    pts = spec.points()
    r2 = np.sum(pts**2, axis=1).reshape(spec.shape)
    f = GridField(spec=spec, values=np.exp(-0.5 * r2 / 4.0))
    drift = sin_profile(amplitude=0.2, dimension=2)
    sol = neumann_solve(f, 1.0, drift, cyl2, tol=1e-5)
    assert sol.final_residual < 1e-4 * f.norm(p=2)
    assert sol.r_hat < 0.9


def test_neumann_contraction_failure(cauchy1):
    spec = centered_spec(400.0, 0.05, 1)
    x = spec.axes()[0]
    f = GridField(spec=spec, values=np.exp(-0.5 * x * x))
    wild = tanh_profile(amplitude=5.0, scale=1.0, dimension=1)
    with pytest.raises(ContractionFailure) as err:
        neumann_solve(f, 1.0, wild, cauchy1)
    assert err.value.ratio >= 0.9


def test_neumann_max_iter_exceeded(cauchy1):
    spec = centered_spec(400.0, 0.05, 1)
    x = spec.axes()[0]
    f = GridField(spec=spec, values=np.exp(-0.5 * x * x))
    drift = tanh_profile(amplitude=0.8, scale=1.0, dimension=1)
    with pytest.raises(MaxIterExceeded) as err:
        neumann_solve(f, 1.0, drift, cauchy1, tol=1e-12, max_iter=2)
    assert len(err.value.history) >= 1


def test_deviation_integral_matches_quadrature(cauchy1):
    got = deviation_integral(0.0, 0.01, 1.0, 4.0, 0.0, cauchy1)
    want = oracles.deviation_reference_1d(0.01, 1.0, 4.0)
    assert abs(got - want) < 0.02 * want


def test_deviation_integral_bounded_in_gamma(cauchy1):
    # bounded means no blow-up as the pair separation shrinks: the values
    # plateau for small gamma instead of diverging
    vals = [
        deviation_integral(0.0, g, 1.0, 4.0, 0.0, cauchy1)
        for g in (1e-3, 1e-2, 0.1, 1.0)
    ]
    assert all(0.0 < v < 1.0 for v in vals)
    assert vals[0] < 1.2 * vals[1]


def test_deviation_integral_decreases_in_lambda(cauchy1):
    lo = deviation_integral(0.0, 0.05, 1.0, 4.0, 0.0, cauchy1)
    hi = deviation_integral(0.0, 0.05, 4.0, 4.0, 0.0, cauchy1)
    assert hi < lo


def test_deviation_integral_two_dimensional(cyl2):
    quad = TimeQuad(n_t=8)
    val = deviation_integral(
        (0.0, 0.0), (0.1, 0.0), 1.0, 4.0, (0.0, 0.0), cyl2, quad=quad
    )
    assert 0.0 < val < 10.0


def test_deviation_integral_validation(cauchy1, cyl2, cyl3):
    with pytest.raises(ValueError):
        deviation_integral(0.0, 0.1, 1.0, 0.5, 0.0, cauchy1)
    with pytest.raises(ValueError):
        deviation_integral(0.3, 0.3, 1.0, 4.0, 0.0, cauchy1)
    with pytest.raises(UnsupportedDimension):
        deviation_integral(
            (0.0, 0.0, 0.0), (0.1, 0.0, 0.0), 1.0, 4.0, (0.0, 0.0, 0.0), cyl3
        )


def test_deviation_integral_grid_guard(cyl2):
    quad = TimeQuad(fine=64.0)
    with pytest.raises(GridError):
        deviation_integral(
            (0.0, 0.0), (1e-3, 0.0), 1.0, 4.0, (0.0, 0.0), cyl2, quad=quad
        )
