"""Action functionals on loops and quarter-period segments, and their Sobolev gradient.

The loop functional integrates the reduced Lagrangian

    L_eps = 1/2 (|q1'|^2 + |q2'|^2) + U(q1, q2) + eps * (strong-force terms)

over ``[0, 2 pi]`` with the trapezoid rule on ``m`` uniform points.  For
symmetric loops it equals eight times the segment functional on ``[0, pi/4]``.

Because the coefficient basis is H^1-orthonormal, the partial derivatives of
the discretized action with respect to the coefficients are exactly the
components of its H^1 (Riesz) gradient.  Plain steepest descent in these
coordinates is therefore a Sobolev gradient flow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import body_separations, check_collision, potential_gradient, potential_parts
from .pathspace import TWO_PI, FourierLoop, grid_basis, segment_quadrature

DEFAULT_QUADRATURE = 2048
SEGMENT_LENGTH = np.pi / 4


@dataclass(frozen=True)
class ActionValue:
    total: float
    kinetic: float
    potential: float
    strong_force: float

    @classmethod
    def from_parts(cls, kinetic, potential, strong_force):
        kinetic, potential, strong_force = float(kinetic), float(potential), float(strong_force)
        return cls(kinetic + potential + strong_force, kinetic, potential, strong_force)

    def scaled(self, a):
        return ActionValue(a * self.total, a * self.kinetic, a * self.potential, a * self.strong_force)


def kinetic_loop(x: FourierLoop):
    """Exact ``int_0^{2 pi} 1/2 |q'|^2 dt`` (Parseval in the scaled basis)."""
    ell = np.arange(x.k + 1, dtype=float)
    w = (0.5 * ell**2 / (1.0 + ell**2))[:, None]
    return math.fsum((w * (x.xi**2 + x.eta**2)).ravel())


def _grid_positions(x, m):
    t, s, c, _, _ = grid_basis(x.k, m)
    q = s @ x.xi + c @ x.eta
    return t, q


def action_loop(x: FourierLoop, eps=0.0, m=DEFAULT_QUADRATURE) -> ActionValue:
    if m <= 2 * x.k:
        raise ValueError(f"quadrature m={m} must exceed 2k={2 * x.k}")
    t, q = _grid_positions(x, m)
    check_collision(q[:, 0:2], q[:, 2:4], times=t)
    u, s = potential_parts(q[:, 0:2], q[:, 2:4], eps)
    return ActionValue.from_parts(kinetic_loop(x), TWO_PI * math.fsum(u) / m, TWO_PI * math.fsum(s) / m)


def segment_action(path, eps=0.0, n=512) -> ActionValue:
    """``J_eps`` over ``[0, pi/4]`` by composite Simpson on ``n + 1`` points.

    ``path`` is anything with vectorized ``positions(t)`` and
    ``velocities(t)`` returning ``(..., 4)`` arrays, e.g. a
    :class:`FourierLoop` or the explicit test path.
    """
    if n % 2:
        n += 1
    t = np.linspace(0.0, SEGMENT_LENGTH, n + 1)
    q = path.positions(t)
    v = path.velocities(t)
    check_collision(q[:, 0:2], q[:, 2:4], times=t)
    u, s = potential_parts(q[:, 0:2], q[:, 2:4], eps)
    kin = 0.5 * np.sum(v**2, axis=1)
    return ActionValue.from_parts(
        segment_quadrature(kin, SEGMENT_LENGTH),
        segment_quadrature(u, SEGMENT_LENGTH),
        segment_quadrature(s, SEGMENT_LENGTH),
    )


def action_segment(x, eps=0.0, n=None) -> ActionValue:
    if n is None:
        n = max(512, 4 * getattr(x, "k", 128))
    return segment_action(x, eps, n)


def gradient(x: FourierLoop, eps=0.0, m=DEFAULT_QUADRATURE) -> FourierLoop:
    """H^1 gradient of :func:`action_loop` as a loop of coefficients.

    This is ``+grad``; the descent direction is its negative.
    """
    return value_and_gradient(x, eps, m)[1]


def value_and_gradient(x: FourierLoop, eps=0.0, m=DEFAULT_QUADRATURE):
    """``(total loop action, gradient, minimum body separation on the grid)`` in one pass."""
    t, s, c, _, _ = grid_basis(x.k, m)
    q = s @ x.xi + c @ x.eta
    q1 = q[:, 0:2]
    q2 = q[:, 2:4]
    check_collision(q1, q2, times=t)
    u, sf = potential_parts(q1, q2, eps)
    value = kinetic_loop(x) + TWO_PI * math.fsum(u + sf) / m
    g1, g2 = potential_gradient(q1, q2, eps)
    gu = np.concatenate([g1, g2], axis=1) * (TWO_PI / m)
    ell = np.arange(x.k + 1, dtype=float)
    kin = (ell**2 / (1.0 + ell**2))[:, None]
    grad = FourierLoop(kin * x.xi + s.T @ gu, kin * x.eta + c.T @ gu)
    return float(value), grad, float(body_separations(q1, q2).min())


def gradient_via_basis(x: FourierLoop, eps=0.0, m=DEFAULT_QUADRATURE) -> FourierLoop:
    """The gradient written literally as the two integrals per basis function.

    Slow, kept as a transcription check for :func:`gradient`: the kinetic part
    is integrated by quadrature instead of the closed form.
    """
    t, s, c, ds, dc = grid_basis(x.k, m)
    q = s @ x.xi + c @ x.eta
    v = ds @ x.xi + dc @ x.eta
    g1, g2 = potential_gradient(q[:, 0:2], q[:, 2:4], eps)
    gu = np.concatenate([g1, g2], axis=1)
    w = TWO_PI / m
    # d/dxi_lj  = int q'_j l c_l cos(lt) + dU/dq_j c_l sin(lt)
    # d/deta_lj = int -q'_j l c_l sin(lt) + dU/dq_j c_l cos(lt)
    gxi = w * (ds.T @ v + s.T @ gu)
    geta = w * (dc.T @ v + c.T @ gu)
    return FourierLoop(gxi, geta)

