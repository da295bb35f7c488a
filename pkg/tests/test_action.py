import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import loop_action_quad
from supereight.action import (
    action_loop,
    action_segment,
    gradient,
    gradient_via_basis,
    kinetic_loop,
    segment_action,
    value_and_gradient,
)
from supereight.dynamics import CollisionError
from supereight.pathspace import FourierLoop, random_init

seeds = st.integers(0, 5000)


@given(seeds)
@settings(max_examples=20)
def test_kinetic_closed_form_matches_quadrature(seed):
    x = random_init(seed, 10)
    _, v = x.positions(0.0), x.velocities(2 * math.pi * np.arange(512) / 512)
    assert kinetic_loop(x) == pytest.approx(0.5 * np.sum(v**2) * 2 * math.pi / 512, rel=1e-12)


def test_parts_add_up():
    a = action_loop(random_init(1, 12), 0.05, 512)
    assert a.total == pytest.approx(a.kinetic + a.potential + a.strong_force, abs=1e-12)
    assert a.strong_force > 0


@given(seeds)
@settings(max_examples=10)
def test_loop_is_eight_segments(seed):
    x = random_init(seed, 8)
    assert action_loop(x, 0.01, 2048).total == pytest.approx(8 * segment_action(x, 0.01, 2048).total, rel=1e-8)


def test_loop_action_matches_adaptive_quadrature():
    x = random_init(4, 6)
    assert action_loop(x, 0.02, 4096).total == pytest.approx(loop_action_quad(x.xi, x.eta, 0.02), rel=1e-9)


def test_quadrature_converges_under_refinement():
    x = random_init(2, 8)
    a = action_loop(x, 0.0, 1024).total
    b = action_loop(x, 0.0, 2048).total
    assert abs(a - b) < 1e-8


@given(seeds, st.floats(1e-4, 0.5), st.floats(1e-4, 0.5))
@settings(max_examples=20)
def test_action_monotone_in_eps(seed, e1, e2):
    if e1 == e2:
        return
    lo, hi = sorted((e1, e2))
    x = random_init(seed, 8)
    assert action_loop(x, lo, 256).total < action_loop(x, hi, 256).total
    assert action_loop(x, 0.0, 256).total < action_loop(x, lo, 256).total


@pytest.mark.parametrize("eps", [0.0, 0.01])
def test_gradient_matches_literal_basis_integrals(eps):
    x = random_init(6, 12)
    g = gradient(x, eps, 1024)
    h = gradient_via_basis(x, eps, 1024)
    assert np.allclose(g.vector(), h.vector(), atol=1e-11)


def test_gradient_fd_in_single_coordinates():
    x = random_init(8, 6)
    f0, g, _ = value_and_gradient(x, 0.01, 512)
    v = x.vector()
    h = 1e-6
    for i in range(0, v.size, 5):
        e = np.zeros_like(v)
        e[i] = h
        fp = value_and_gradient(FourierLoop.from_vector(v + e, 6), 0.01, 512)[0]
        fm = value_and_gradient(FourierLoop.from_vector(v - e, 6), 0.01, 512)[0]
        assert (fp - fm) / (2 * h) == pytest.approx(g.vector()[i], rel=1e-6, abs=1e-8)


def test_value_and_gradient_consistent_with_action_loop():
    x = random_init(3, 8)
    f, _, dmin = value_and_gradient(x, 0.02, 512)
    assert f == pytest.approx(action_loop(x, 0.02, 512).total, rel=1e-13)
    assert dmin > 0


def test_action_segment_default_resolution():
    x = random_init(3, 8)
    assert action_segment(x).total == pytest.approx(segment_action(x, 0.0, 512).total)


def test_collision_raises_with_time():
    xi = np.zeros((2, 4))
    eta = np.zeros((2, 4))
    eta[1, 0] = 1.0  # q2 identically zero
    x = FourierLoop(xi, eta)
    with pytest.raises(CollisionError) as e:
        action_loop(x, 0.0, 64)
    assert e.value.time is not None


def test_quadrature_too_coarse():
    with pytest.raises(ValueError):
        action_loop(random_init(0, 16), 0.0, 32)
