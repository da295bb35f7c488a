"""Closed-form action bounds and the explicit comparison path.

Each quantity comes as a :class:`BoundReport` pairing a closed-form value with
an independent numerical oracle.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize

from .action import SEGMENT_LENGTH, segment_action
from .dynamics import Configuration, potential

SQRT2 = math.sqrt(2.0)
# closed form given for the test-path action: 7 pi/8 + sqrt5/4 + sqrt2/8 + sqrt13/4 + 1/2
TEST_PATH_CONSTANT = 7 * math.pi / 8 + math.sqrt(5) / 4 + SQRT2 / 8 + math.sqrt(13) / 4 + 0.5
# reference minimum of U on the unit shape sphere; direct evaluation gives 2 + sqrt2
QUOTED_SHAPE_MIN = 4.0 + SQRT2
SQUARE_SHAPE_MIN = 2.0 + SQRT2


@dataclass(frozen=True)
class BoundReport:
    name: str
    formula_value: float
    oracle_value: float
    discrepancy: float

    @classmethod
    def compare(cls, name, formula_value, oracle_value):
        formula_value, oracle_value = float(formula_value), float(oracle_value)
        return cls(name, formula_value, oracle_value, abs(formula_value - oracle_value))

    def as_dict(self):
        return asdict(self)


def kepler_min_action(alpha, T0):
    """Minimal action of a collision-ejection Kepler arc of duration ``T0``
    in the potential ``alpha / r``: ``(3/2) pi^(2/3) alpha^(2/3) T0^(1/3)``."""
    if not (alpha > 0 and T0 > 0):
        raise ValueError(f"alpha and T0 must be positive, got {alpha}, {T0}")
    return 1.5 * math.pi ** (2 / 3) * alpha ** (2 / 3) * T0 ** (1 / 3)


def total_collision_lower_bound():
    """``3 * 2^(-4/3) * (1 + 2 sqrt2)^(2/3) * pi``, about 9.1533."""
    return 3.0 * 2.0 ** (-4 / 3) * (1.0 + 2.0 * SQRT2) ** (2 / 3) * math.pi


def _sphere_point(psi, a, b):
    """Hopf coordinates on ``|s1|^2 + |s2|^2 = 1``."""
    s1 = np.stack([np.cos(psi) * np.cos(a), np.cos(psi) * np.sin(a)], axis=-1)
    s2 = np.stack([np.sin(psi) * np.cos(b), np.sin(psi) * np.sin(b)], axis=-1)
    return s1, s2


def _sphere_potential(angles):
    s1, s2 = _sphere_point(*angles)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = potential(s1, s2)
    return np.where(np.isfinite(u), u, np.inf)


def shape_potential_min(resolution=32):
    """Minimum of ``U`` on the unit 3-sphere of shapes.

    Brute-force search over a ``resolution^3`` grid in Hopf coordinates,
    polished by Nelder-Mead from the best grid point.  Returns the value and
    the minimizing :class:`Configuration`.
    """
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    # half-cell offsets keep the grid off the collision set
    psi = (np.arange(resolution) + 0.5) * (0.5 * math.pi / resolution)
    ang = (np.arange(2 * resolution) + 0.5) * (math.pi / resolution)
    grid = np.meshgrid(psi, ang, ang, indexing="ij")
    u = _sphere_potential(grid)
    i = np.unravel_index(np.argmin(u), u.shape)
    start = np.array([g[i] for g in grid])
    res = minimize(lambda p: float(_sphere_potential(p)), start, method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 20000})
    s1, s2 = _sphere_point(*res.x)
    return float(res.fun), Configuration(s1, s2)


class TestPath:
    """``q1(t) = (t, pi/4 - 2t)``, ``q2(t) = (pi/2 - t, t)`` on ``[0, pi/4]``.

    Kinetic density is ``(1 + 4 + 1 + 1)/2 = 7/2``.
    """

    __test__ = False  # keep pytest from collecting it

    def positions(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([t, math.pi / 4 - 2 * t, math.pi / 2 - t, t], axis=-1)

    def velocities(self, t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(np.array([1.0, -2.0, -1.0, 1.0]), t.shape + (4,)).copy()


TEST_PATH = TestPath()


def test_path(t):
    """Configuration of the comparison path at ``t`` in ``[0, pi/4]``."""
    t = float(t)
    if not 0.0 <= t <= SEGMENT_LENGTH:
        raise ValueError(f"t = {t} outside [0, pi/4]")
    q = TEST_PATH.positions(t)
    return Configuration(q[0:2], q[2:4])


test_path.__test__ = False


def test_path_action(n=4096, eps=0.0):
    """Composite Simpson value of the segment action of the test path,
    reported against the closed-form constant."""
    value = segment_action(TEST_PATH, eps, n)
    return BoundReport.compare("test_path", TEST_PATH_CONSTANT, value.total)


test_path_action.__test__ = False


def test_path_action_adaptive():
    """Same integral by adaptive Gauss-Kronrod, as a second oracle."""

    def f(t):
        q = TEST_PATH.positions(t)
        return 3.5 + float(potential(q[0:2], q[2:4]))

    return quad(f, 0.0, SEGMENT_LENGTH, epsabs=1e-13, epsrel=1e-13, limit=200)[0]


test_path_action_adaptive.__test__ = False


def bound_reports(resolution=32):
    """Every bound as a list of reports, in display order."""
    total = total_collision_lower_bound()
    umin, _ = shape_potential_min(resolution)
    return [
        BoundReport.compare("total_collision", total, kepler_min_action(QUOTED_SHAPE_MIN, SEGMENT_LENGTH)),
        BoundReport.compare("shape_potential_min", QUOTED_SHAPE_MIN, umin),
        BoundReport.compare("kepler_at_shape_min", total, kepler_min_action(umin, SEGMENT_LENGTH)),
        test_path_action(),
    ]
