"""Independent validation of a loop against the unregularized Newton flow.

The loop's state at ``t = 0`` is integrated with an adaptive 8th order
Runge-Kutta method and compared with the loop itself in phase space.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .dynamics import (
    CollisionError,
    PAIR_NAMES,
    PhasePoint,
    acceleration_arrays,
    angular_momentum_array,
    body_separations,
    energy_array,
    pair_distances,
    rhs,
)
from .pathspace import TWO_PI, FourierLoop, mode_scale
from .symmetry import symmetry_defect

CLOSE_APPROACH = 1e-6
NEWTON_GRID = 256
SEPARATION_GRID = 4096

SQUARE_RADIUS = (0.5 + 1.0 / np.sqrt(2.0)) ** (1.0 / 3.0)


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray  # (len(t), 8)
    nfev: int

    def energy(self):
        return energy_array(self.y)

    def angular_momentum(self):
        return angular_momentum_array(self.y)


def _approach_event(t, y):
    return np.min(pair_distances(y[0:2], y[2:4])) - CLOSE_APPROACH


_approach_event.terminal = True
_approach_event.direction = -1


def integrate_newton(initial, t_span=(0.0, TWO_PI), tol=1e-12, t_eval=None) -> Trajectory:
    """Integrate the reduced Newton equations with DOP853 at ``rtol = atol = tol``.

    ``initial`` is a :class:`PhasePoint` or a flat 8-vector.  Raises
    :class:`CollisionError` if any pair distance drops below ``1e-6``.
    """
    y0 = initial.as_array() if isinstance(initial, PhasePoint) else np.asarray(initial, dtype=float)
    if np.min(pair_distances(y0[0:2], y0[2:4])) <= CLOSE_APPROACH:
        raise CollisionError("initial", np.min(pair_distances(y0[0:2], y0[2:4])), t_span[0])
    sol = solve_ivp(rhs, t_span, y0, method="DOP853", rtol=tol, atol=tol, t_eval=t_eval,
                    events=_approach_event)
    if sol.status == 1:
        te = float(sol.t_events[0][0])
        ye = sol.y_events[0][0]
        d = pair_distances(ye[0:2], ye[2:4])
        raise CollisionError(PAIR_NAMES[int(np.argmin(d))], float(d.min()), te)
    if sol.status != 0:
        raise RuntimeError(f"integration failed: {sol.message}")
    return Trajectory(sol.t, sol.y.T, int(sol.nfev))


@dataclass
class ResidualReport:
    newton_sup: float
    energy_drift: float
    momentum_drift: float
    periodicity: float
    choreography: float
    symmetry: float
    min_separation: float
    ode_residual: float

    def as_dict(self):
        return {k: float(v) for k, v in asdict(self).items()}


def ode_residual(x: FourierLoop, m=NEWTON_GRID):
    """``sup |q'' - a(q)|`` with ``q''`` from the differentiated series."""
    t = TWO_PI * np.arange(m) / m
    ell = np.arange(x.k + 1)
    arg = np.outer(t, ell)
    c = mode_scale(x.k) * ell**2
    acc = -(np.sin(arg) * c) @ x.xi - (np.cos(arg) * c) @ x.eta
    q = x.positions(t)
    a1, a2 = acceleration_arrays(q[:, 0:2], q[:, 2:4])
    return float(np.max(np.abs(acc - np.concatenate([a1, a2], axis=1))))


def residual_report(orbit, tol=1e-12, n=NEWTON_GRID) -> ResidualReport:
    """Compare a loop (or anything with a ``.loop`` attribute) with its Newton flow.

    An integration abort yields ``newton_sup = periodicity = inf``.
    """
    x = getattr(orbit, "loop", orbit)
    t = TWO_PI * np.arange(n + 1) / n
    states = np.concatenate([x.positions(t), x.velocities(t)], axis=1)
    try:
        traj = integrate_newton(states[0], (0.0, TWO_PI), tol, t_eval=t)
        newton = float(np.max(np.abs(traj.y - states)))
        period = float(np.linalg.norm(traj.y[-1] - traj.y[0]))
    except CollisionError:
        newton = period = np.inf
    # loops through a collision give inf/nan diagnostics rather than warnings
    with np.errstate(divide="ignore", invalid="ignore"):
        e = energy_array(states[:-1])
        ode = ode_residual(x, n)
    mom = angular_momentum_array(states[:-1])
    tt = TWO_PI * np.arange(SEPARATION_GRID) / SEPARATION_GRID
    q = x.positions(tt)
    shift = x.positions(tt + np.pi / 2)
    return ResidualReport(
        newton_sup=newton,
        energy_drift=float(e.max() - e.min()),
        momentum_drift=float(mom.max() - mom.min()),
        periodicity=period,
        choreography=float(np.max(np.linalg.norm(q[:, 2:4] - shift[:, 0:2], axis=1))),
        symmetry=float(symmetry_defect(x)),
        min_separation=float(body_separations(q[:, 0:2], q[:, 2:4]).min()),
        ode_residual=ode,
    )


def rotating_square_loop(k=32, omega=-1.0):
    """The square relative equilibrium as a loop of order ``k``.

    Bodies sit on a circle of radius ``R`` with ``omega^2 R^3 = 1/2 + 1/sqrt(2)``
    and rotate with angular velocity ``omega``; only ``|omega| = 1`` is
    2 pi periodic.  ``omega = -1`` is the orientation compatible with the
    symmetry group, ``q1 = R (sin t, cos t)`` and ``q2 = R (cos t, -sin t)``.
    """
    if abs(omega) != 1.0:
        raise ValueError("only omega = +-1 closes up in time 2 pi")
    c1 = mode_scale(k)[1]
    r = SQUARE_RADIUS / c1
    xi = np.zeros((k + 1, 4))
    eta = np.zeros((k + 1, 4))
    # q1(t) = R (cos(pi/2 + omega t), sin(pi/2 + omega t)), q2 = q1 rotated by -pi/2
    xi[1, 0] = -omega * r
    eta[1, 1] = r
    eta[1, 2] = r
    xi[1, 3] = omega * r
    return FourierLoop(xi, eta)
