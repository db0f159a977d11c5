import numpy as np
import pytest

from onestable import (
    DimensionError,
    constant,
    drift_from_spec,
    from_callable,
    piecewise_smooth,
    sin_profile,
    tanh_profile,
    zero,
)
from oracles import fd_gradient


def _check_envelope(drift, n=20_000, span=30.0):
    rng = np.random.default_rng(10)
    pts = rng.uniform(-span, span, size=(n, drift.dimension))
    b = drift(pts)
    assert np.all(np.isfinite(b))
    norms = np.linalg.norm(b, axis=-1)
    assert np.max(norms) <= drift.bound * (1 + 1e-12)
    dev = np.linalg.norm(b - drift.b0, axis=-1)
    assert np.max(dev) <= drift.epsilon * (1 + 1e-12)


def test_tanh_envelope():
    _check_envelope(tanh_profile(amplitude=0.1, scale=0.5, dimension=2))


def test_sin_envelope():
    _check_envelope(sin_profile(amplitude=0.2, dimension=2))


def test_piecewise_envelope():
    _check_envelope(piecewise_smooth(amplitude=0.3, scale=1.5, dimension=3))


def test_piecewise_is_c1():
    d = piecewise_smooth(amplitude=0.3, scale=1.0, dimension=1)
    # derivative continuous across the saturation knot at |x| = scale
    for x0 in (1.0, -1.0):
        left = fd_gradient(lambda x: d(x)[0], np.array([x0 - 1e-5]))
        right = fd_gradient(lambda x: d(x)[0], np.array([x0 + 1e-5]))
        assert abs(left[0] - right[0]) < 1e-3


def test_constant_and_zero():
    c = constant(np.array([0.4, -0.1]))
    assert c.epsilon == 0.0
    assert np.allclose(c.b0, [0.4, -0.1])
    assert np.allclose(c(np.zeros((5, 2))), np.tile([0.4, -0.1], (5, 1)))
    z = zero(3)
    assert z.bound == 0.0
    assert np.allclose(z(np.ones((2, 3))), 0.0)


def test_shape_handling():
    d = tanh_profile(amplitude=0.1, scale=1.0, dimension=2)
    single = d(np.array([0.3, -0.3]))
    assert single.shape == (2,)
    batch = d(np.array([[0.3, -0.3]]))
    assert batch.shape == (1, 2)
    assert np.allclose(batch[0], single)
    with pytest.raises(DimensionError):
        d(np.zeros(3))


def test_from_callable_estimates():
    # affine drift clipped to a box: b0 should land mid-range, eps covers it
    def fn(pts):
        return np.clip(0.2 * pts, -0.5, 0.5)

    d = from_callable(fn, dimension=2)
    assert d.epsilon <= 0.5 * np.sqrt(2) * 1.05
    probe = np.random.default_rng(11).uniform(-40, 40, size=(5000, 2))
    dev = np.linalg.norm(d(probe) - d.b0, axis=-1)
    assert np.max(dev) <= d.epsilon * (1 + 1e-9)


def test_spec_parsing():
    d = drift_from_spec("tanh:amp=0.1,scale=2", dimension=1)
    assert d.name == "tanh"
    assert d(np.array([100.0]))[0] == pytest.approx(0.1)
    c = drift_from_spec("const:v=0.3/-0.2", dimension=2)
    assert np.allclose(c.b0, [0.3, -0.2])
    z = drift_from_spec("zero", dimension=2)
    assert z.bound == 0.0
    with pytest.raises(ValueError):
        drift_from_spec("tanh:amp=0.1,bogus=1", dimension=1)
    with pytest.raises(ValueError):
        drift_from_spec("warp:amp=0.1", dimension=1)
