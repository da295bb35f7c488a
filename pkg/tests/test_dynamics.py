import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import fd_gradient, pair_sum_potential, rk4_newton
from supereight.dynamics import (
    CollisionError,
    Configuration,
    PhasePoint,
    acceleration,
    angular_momentum,
    body_separations,
    check_collision,
    energy,
    potential,
    potential_gradient,
    potential_U,
)
from supereight.verify import integrate_newton

coord = st.floats(-3, 3, allow_nan=False)
point = st.tuples(coord, coord).map(np.array)


def _free(q1, q2, floor=0.05):
    return min(np.linalg.norm(q1), np.linalg.norm(q2), np.linalg.norm(q1 - q2), np.linalg.norm(q1 + q2)) > floor


def test_potential_examples():
    assert potential_U(Configuration((1, 0), (0, 1))) == pytest.approx(math.sqrt(2) + 1, abs=1e-12)
    assert potential_U(Configuration((0, 1), (2, 0))) == pytest.approx(2 / math.sqrt(5) + 0.75, abs=1e-12)


@given(point, point)
def test_potential_matches_pair_sum(q1, q2):
    if not _free(q1, q2):
        return
    assert potential(q1, q2) == pytest.approx(pair_sum_potential(q1, q2), rel=1e-12)
    assert potential(q1, q2, 0.3) == pytest.approx(pair_sum_potential(q1, q2, 0.3), rel=1e-12)


@given(point, point, st.floats(0, 2 * math.pi))
def test_potential_symmetries(q1, q2, phi):
    if not _free(q1, q2):
        return
    u = potential(q1, q2)
    r = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    assert potential(q2, q1) == pytest.approx(u, rel=1e-12)
    assert potential(-q1, q2) == pytest.approx(u, rel=1e-12)
    assert potential(r @ q1, r @ q2) == pytest.approx(u, rel=1e-10)


def test_acceleration_example():
    a1, _ = acceleration(Configuration((0, 1), (1, 0)))
    assert np.allclose(a1, [0, -0.5 - 1 / math.sqrt(2)], atol=1e-12)


def test_acceleration_square_symmetric():
    a1, a2 = acceleration(Configuration((1, 0), (0, 1)))
    assert np.linalg.norm(a1) == pytest.approx(np.linalg.norm(a2), rel=1e-14)


def test_acceleration_is_gradient_of_force_function():
    rng = np.random.default_rng(1)
    n = 0
    while n < 100:
        q = rng.uniform(-2, 2, 4)
        if not _free(q[0:2], q[2:4], 0.2):
            continue
        n += 1
        a1, a2 = acceleration(Configuration(q[0:2], q[2:4]))
        fd = fd_gradient(lambda v: pair_sum_potential(v[0:2], v[2:4]), q)
        assert np.allclose(np.concatenate([a1, a2]), fd, rtol=1e-8, atol=1e-8)


@given(point, point, st.floats(0, 1))
def test_strong_force_gradient_fd(q1, q2, eps):
    if not _free(q1, q2, 0.2):
        return
    g1, g2 = potential_gradient(q1, q2, eps)
    fd = fd_gradient(lambda v: pair_sum_potential(v[0:2], v[2:4], eps), np.concatenate([q1, q2]))
    assert np.allclose(np.concatenate([g1, g2]), fd, rtol=1e-6, atol=1e-6)


@pytest.mark.parametrize("q1,q2,which", [
    ((0, 0), (1, 0), "q1"),
    ((1, 0), (0, 0), "q2"),
    ((1, 1), (1, 1), "q1-q2"),
    ((1, 1), (-1, -1), "q1+q2"),
])
def test_collision_names_denominator(q1, q2, which):
    with pytest.raises(CollisionError) as e:
        potential_U(Configuration(q1, q2))
    assert e.value.which == which
    assert not Configuration(q1, q2).is_collision_free()


def test_check_collision_reports_time():
    q1 = np.array([[1.0, 0.0], [0.0, 0.0]])
    q2 = np.array([[0.0, 1.0], [0.0, 1.0]])
    with pytest.raises(CollisionError) as e:
        check_collision(q1, q2, times=np.array([0.0, 0.5]))
    assert e.value.time == 0.5


def test_energy_examples():
    c = Configuration((1, 0), (0, 1))
    p = PhasePoint(c, (0, 0), (0, 0))
    assert energy(p) == pytest.approx(-(math.sqrt(2) + 1), abs=1e-12)
    p1, p2 = np.array([0.3, -0.2]), np.array([0.1, 0.7])
    a = PhasePoint(c, p1, p2)
    b = PhasePoint(c, math.sqrt(2) * p1, math.sqrt(2) * p2)
    assert energy(b) - energy(a) == pytest.approx(0.5 * (p1 @ p1 + p2 @ p2), abs=1e-12)


def test_angular_momentum_examples():
    c = Configuration((1, 0), (0, 2))
    assert angular_momentum(PhasePoint(c, (0, 0), (0, 0))) == 0
    assert angular_momentum(PhasePoint(c, (0, 1), (0, 0))) == pytest.approx(1.0)


def test_phase_point_roundtrip():
    y = np.arange(8.0) + 1
    assert np.array_equal(PhasePoint.from_array(y).as_array(), y)


def test_body_separations_counts_antipodal_pairs():
    q1 = np.array([0.1, 0.0])
    q2 = np.array([0.0, 2.0])
    assert body_separations(q1, q2) == pytest.approx(0.2)


def test_conservation_along_newton_flow():
    y0 = np.array([0.0, 0.8, 1.3, 0.0, 0.5, 0.0, 0.0, -0.4])
    tr = integrate_newton(y0, (0.0, 2 * math.pi), t_eval=np.linspace(0, 2 * math.pi, 101))
    e = tr.energy()
    assert np.ptp(e) < 1e-9 * abs(e[0])
    assert np.ptp(tr.angular_momentum()) < 1e-9


def test_newton_flow_matches_hand_written_rk4():
    y0 = np.array([0.0, 0.8, 1.3, 0.0, 0.5, 0.0, 0.0, -0.4])
    tr = integrate_newton(y0, (0.0, 1.0), t_eval=[1.0])
    assert np.allclose(tr.y[-1], rk4_newton(y0, 1.0, 4000), atol=1e-9)
