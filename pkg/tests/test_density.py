import math

import numpy as np
import pytest

from onestable import (
    GridField,
    GridTooCoarse,
    auto_grid,
    cdf_callable_1d,
    centered_spec,
    density_grid,
    density_point,
    derivative_scaling_probe,
    grid_cdf_1d,
    invert_even_cf_1d,
    levy_exponent,
    project_measure,
    symmetrize,
)
from oracles import cauchy_cdf, cauchy_pdf, density_by_quad


def test_point_density_origin_1d(cauchy1):
    assert density_point(cauchy1, 1.0, np.zeros(1)) == pytest.approx(
        1.0 / math.pi, abs=1e-10
    )


def test_point_density_origin_2d(cyl2):
    assert density_point(cyl2, 1.0, np.zeros(2)) == pytest.approx(
        1.0 / math.pi**2, abs=1e-9
    )


def test_grid_matches_closed_form_1d(cauchy1):
    spec = centered_spec(1024.0, 0.1, 1)
    fld = density_grid(cauchy1, 1.0, spec=spec)
    x = spec.axes()[0]
    sel = np.abs(x) < 20.0
    target = np.array([cauchy_pdf(v) for v in x[sel]])
    assert np.max(np.abs(fld.values[sel] - target)) < 1e-6


def test_grid_matches_quad_oracle_weighted():
    mu, _ = symmetrize([(np.array([1.0]), 0.75)], dimension=1)
    spec = centered_spec(2048.0, 0.08, 1)
    fld = density_grid(mu, 1.3, spec=spec)
    xs = fld.spec.axes()[0]
    mid = len(xs) // 2
    for i in (mid, mid + 5, mid + 31):  # exact nodes, no interpolation
        target = density_by_quad(lambda u: 0.75 * abs(u), 1.3, xs[i])
        assert fld.values[i] == pytest.approx(target, abs=2e-6)


def test_point_matches_grid_2d(cyl2):
    # the default grid leaves ~1e-4 tail aliasing; the point quadrature is
    # much tighter, so agreement at 5e-4 checks consistency of the two paths
    fld = density_grid(cyl2, 1.0)
    ax = fld.spec.axes()
    i, j = len(ax[0]) // 2 + 5, len(ax[1]) // 2 - 3
    x = np.array([ax[0][i], ax[1][j]])
    pt = density_point(cyl2, 1.0, x)
    assert fld.values[i, j] == pytest.approx(pt, abs=5e-4)


def test_self_similarity_matched_grids_exact(cauchy1):
    spec2 = centered_spec(512.0, 0.125, 1)
    spec1 = centered_spec(256.0, 0.0625, 1)
    p2 = density_grid(cauchy1, 2.0, spec=spec2)
    p1 = density_grid(cauchy1, 1.0, spec=spec1)
    # nodes of spec1 are exactly half the nodes of spec2
    assert np.allclose(spec1.axes()[0], spec2.axes()[0] / 2.0)
    assert np.array_equal(p2.values, 0.5 * p1.values)


def test_self_similarity_interpolated(cyl2):
    p2 = density_grid(cyl2, 2.0)
    p1 = density_grid(cyl2, 1.0)
    pts = np.array([[0.0, 0.0], [0.5, 0.25], [1.5, -1.0], [3.0, 2.0]])
    a = p2.interp(pts)
    b = 0.25 * p1.interp(pts / 2.0)
    assert np.max(np.abs(a - b)) < 1e-5


def test_normalization_and_positivity(cyl2):
    fld = density_grid(cyl2, 1.0)
    mass = float(fld.values.sum()) * fld.spec.cell_volume
    assert mass == pytest.approx(1.0, abs=1e-9)
    x = fld.spec.axes()[0]
    sel = np.abs(x) < 10.0
    assert np.all(fld.values[np.ix_(sel, sel)] > 0)
    assert fld.meta["clip_count"] < fld.values.size * 0.5
    assert fld.meta["min_raw"] > -1e-12


def test_shift_moves_center(cyl2):
    spec = auto_grid(cyl2, 1.0)
    h = spec.spacing[0]
    v = np.array([8 * h, -4 * h])  # lattice-aligned shift
    plain = density_grid(cyl2, 1.0, spec=spec)
    moved = density_grid(cyl2, 1.0, shift=v, spec=spec)
    n = spec.shape[0]
    i = np.arange(n // 4, 3 * n // 4)
    a = moved.values[np.ix_(i + 8, i - 4)]
    b = plain.values[np.ix_(i, i)]
    assert np.max(np.abs(a - b)) < 1e-10


def test_cdf_matches_closed_form(cauchy1):
    fld = density_grid(cauchy1, 1.0, spec=centered_spec(4096.0, 0.1, 1))
    cdf = cdf_callable_1d(fld)
    for x in (-5.0, -1.0, 0.0, 0.3, 2.0):
        assert cdf(x) == pytest.approx(cauchy_cdf(x), abs=5e-4)


def test_grid_cdf_monotone(cauchy1):
    fld = density_grid(cauchy1, 1.0)
    cs = grid_cdf_1d(fld)
    assert np.all(np.diff(cs) >= 0)
    assert cs[0] < 0.05 and cs[-1] > 0.95


def test_invert_even_cf_recovers_cauchy():
    fld = invert_even_cf_1d(lambda u: -np.abs(u), u_decay=40.0, x_extent=512.0)
    xs = fld.spec.axes()[0]
    sel = np.abs(xs) < 10
    target = np.array([cauchy_pdf(v) for v in xs[sel]])
    assert np.max(np.abs(fld.values[sel] - target)) < 1e-6


def test_scaling_probe_flat(cyl2):
    for order in (0, 1, 2):
        rep = derivative_scaling_probe(cyl2, [0.5, 1.0, 2.0], order)
        assert rep.max_over_min < 1.0 + 1e-9
        assert not rep.flagged


def test_grid_too_coarse(cauchy1):
    with pytest.raises(GridTooCoarse) as exc:
        density_grid(cauchy1, 1.0, spec=centered_spec(20.0, 0.5, 1))
    assert exc.value.required_p_max > 0


def test_project_measure(cyl2):
    proj = project_measure(cyl2, np.array([1.0, 0.0]))
    assert proj.dimension == 1
    for u in (0.5, 1.0, 3.0):
        lam2 = np.array([u, 0.0])
        assert levy_exponent(proj, np.array([u])) == pytest.approx(
            levy_exponent(cyl2, lam2)
        )
    diag = np.array([1.0, 1.0]) / math.sqrt(2)
    projd = project_measure(cyl2, diag)
    assert levy_exponent(projd, np.array([1.0])) == pytest.approx(
        levy_exponent(cyl2, diag)
    )


def test_field_binary_roundtrip(tmp_path, cyl2):
    fld = density_grid(cyl2, 1.0)
    prefix = tmp_path / "dens"
    fld.to_binary(prefix)
    back = GridField.from_binary(prefix)
    assert np.array_equal(back.values, fld.values)
    assert back.spec.shape == fld.spec.shape
    assert np.allclose(back.spec.origin, fld.spec.origin)
