import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import direct_positions, direct_velocities
from supereight.pathspace import (
    FourierLoop,
    grid_basis,
    h1_quadrature,
    mode_scale,
    quadrature,
    random_init,
    sample,
    segment_quadrature,
)
from supereight.symmetry import is_fixed, omega_signs


def coeffs(k):
    return arrays(np.float64, (k + 1, 4), elements=st.floats(-2, 2, allow_nan=False))


@given(coeffs(6), coeffs(6))
def test_h1_norm_is_euclidean_norm(xi, eta):
    x = FourierLoop(xi, eta)
    assert x.h1_norm() ** 2 == pytest.approx(h1_quadrature(x, 256), rel=1e-10, abs=1e-10)


@given(coeffs(5), coeffs(5), st.floats(0, 2 * math.pi))
def test_evaluation_matches_direct_sum(xi, eta, t):
    x = FourierLoop(xi, eta)
    assert np.allclose(x.positions(t), direct_positions(x.xi, x.eta, t), atol=1e-12)
    assert np.allclose(x.velocities(t), direct_velocities(x.xi, x.eta, t), atol=1e-12)


def test_sin_zero_mode_is_dropped():
    xi = np.ones((3, 4))
    x = FourierLoop(xi, np.zeros((3, 4)))
    assert np.all(x.xi[0] == 0)
    assert not x.xi.flags.writeable


def test_shape_validation():
    with pytest.raises(ValueError):
        FourierLoop(np.zeros((3, 4)), np.zeros((4, 4)))
    with pytest.raises(ValueError):
        FourierLoop(np.zeros((3, 3)), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        FourierLoop(np.zeros((1, 4)), np.zeros((1, 4)))


def test_mode_scale():
    c = mode_scale(3)
    assert c[0] == pytest.approx(1 / math.sqrt(2 * math.pi))
    assert c[2] == pytest.approx(1 / math.sqrt(5 * math.pi))


def test_vector_roundtrip_and_arithmetic():
    x = random_init(3, 8)
    assert np.array_equal(FourierLoop.from_vector(x.vector(), 8).vector(), x.vector())
    y = random_init(4, 8)
    assert np.allclose((x + y - y).vector(), x.vector())
    assert np.allclose((2 * x).vector(), (x * 2).vector())
    assert np.allclose((-x).vector(), -x.vector())
    assert x.h1_inner(y) == pytest.approx(float(x.vector() @ y.vector()))


def test_resize_pads_and_truncates():
    x = random_init(0, 8)
    big = x.resized(16)
    assert big.k == 16
    assert np.allclose(big.positions(0.3), x.positions(0.3))
    assert np.array_equal(big.resized(8).vector(), x.vector())


def test_grid_basis_derivatives():
    t, s, c, ds, dc = grid_basis(4, 64)
    assert t.shape == (64,) and s.shape == (64, 5)
    h = 1e-6
    x = random_init(0, 4)
    _, q, v = sample(x, 64)
    fd = (x.positions(t + h) - x.positions(t - h)) / (2 * h)
    assert np.allclose(v, fd, atol=1e-7)
    assert not s.flags.writeable


def test_quadratures():
    t = 2 * math.pi * np.arange(64) / 64
    assert quadrature(np.cos(t) ** 2) == pytest.approx(math.pi, rel=1e-14)
    u = np.linspace(0, 1, 101)
    assert segment_quadrature(u**2, 1.0) == pytest.approx(1 / 3, rel=1e-12)
    with pytest.raises(ValueError):
        segment_quadrature(np.ones(2), 1.0)


def test_bodies_lift():
    x = random_init(0, 8)
    b = x.bodies(np.array([0.1, 0.2]))
    assert b.shape == (2, 4, 2)
    assert np.allclose(b[:, 2], -b[:, 0]) and np.allclose(b[:, 3], -b[:, 1])


@pytest.mark.parametrize("seed", range(6))
def test_random_init_admissible(seed):
    x = random_init(seed, 16)
    s = omega_signs(x)
    assert s[0] > 0 and s[1] > 0 and s[2] > 0 and s[3] < 0
    assert is_fixed(x)


def test_random_init_deterministic():
    assert np.array_equal(random_init(7, 12).vector(), random_init(7, 12).vector())
    assert not np.array_equal(random_init(7, 12).vector(), random_init(8, 12).vector())
