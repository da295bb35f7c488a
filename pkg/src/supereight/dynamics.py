"""Reduced mechanics of the parallelogram four-body problem.

Bodies 3 and 4 are slaved to bodies 1 and 2 through ``q3 = -q1`` and
``q4 = -q2``, so every state is described by the pair ``(q1, q2)``.
Units have ``G = m = 1``.

The array-level functions accept positions with arbitrary leading shape and a
trailing axis of length 2; they are what the optimizer and integrators call.
The :class:`Configuration` / :class:`PhasePoint` wrappers are the scalar API.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

COLLISION_THRESHOLD = 1e-12

# order matters: it is the order reported by CollisionError.which
PAIR_NAMES = ("q1-q2", "q1+q2", "q1", "q2")


class CollisionError(ValueError):
    """A configuration (or a sample of a path) sits on the collision set.

    ``which`` names the vanishing denominator, ``time`` is filled in by
    callers that evaluate paths.
    """

    def __init__(self, which, distance, time=None):
        self.which = which
        self.distance = float(distance)
        self.time = time
        msg = f"collision: |{which}| = {self.distance:.3e}"
        if time is not None:
            msg += f" at t = {time:.12g}"
        super().__init__(msg)


@dataclass(frozen=True)
class Configuration:
    q1: np.ndarray
    q2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q1", np.asarray(self.q1, dtype=float).reshape(2))
        object.__setattr__(self, "q2", np.asarray(self.q2, dtype=float).reshape(2))

    def is_collision_free(self, threshold=COLLISION_THRESHOLD):
        return bool(np.min(pair_distances(self.q1, self.q2)) >= threshold)

    def bodies(self):
        """Positions of all four bodies, shape (4, 2)."""
        return np.array([self.q1, self.q2, -self.q1, -self.q2])


@dataclass(frozen=True)
class PhasePoint:
    config: Configuration
    p1: np.ndarray
    p2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p1", np.asarray(self.p1, dtype=float).reshape(2))
        object.__setattr__(self, "p2", np.asarray(self.p2, dtype=float).reshape(2))

    @classmethod
    def from_array(cls, y):
        """Build from the flat state ``(q1x, q1y, q2x, q2y, p1x, p1y, p2x, p2y)``."""
        y = np.asarray(y, dtype=float)
        return cls(Configuration(y[0:2], y[2:4]), y[4:6], y[6:8])

    def as_array(self):
        return np.concatenate([self.config.q1, self.config.q2, self.p1, self.p2])


def pair_distances(q1, q2):
    """The four reduced distances ``|q1-q2|, |q1+q2|, |q1|, |q2|``, stacked on axis 0."""
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    return np.stack([
        np.linalg.norm(q1 - q2, axis=-1),
        np.linalg.norm(q1 + q2, axis=-1),
        np.linalg.norm(q1, axis=-1),
        np.linalg.norm(q2, axis=-1),
    ])


def body_separations(q1, q2):
    """Minimum over the six mutual distances of the four bodies, pointwise."""
    d = pair_distances(q1, q2)
    # |q1-q3| = 2|q1|, |q2-q4| = 2|q2|; the other four pairs reduce to |q1 -+ q2|
    return np.minimum(np.minimum(d[0], d[1]), 2.0 * np.minimum(d[2], d[3]))


def check_collision(q1, q2, times=None, threshold=COLLISION_THRESHOLD):
    d = pair_distances(q1, q2)
    if d.ndim == 1:
        d = d[:, None]
    flat = d.reshape(4, -1)
    idx = np.unravel_index(np.argmin(flat), flat.shape)
    if flat[idx] < threshold:
        t = None if times is None else float(np.ravel(times)[idx[1]])
        raise CollisionError(PAIR_NAMES[idx[0]], flat[idx], t)


def potential(q1, q2, eps=0.0):
    """Reduced force function, optionally with the strong-force terms.

    ``U = 1/|q1-q2| + 1/|q1+q2| + 1/(2|q1|) + 1/(2|q2|)`` plus
    ``eps * (1/|q1-q2|^2 + 1/|q1+q2|^2 + 1/(2|q1|^2) + 1/(2|q2|^2))``.
    No collision checking.
    """
    d = pair_distances(q1, q2)
    u = 1.0 / d[0] + 1.0 / d[1] + 0.5 / d[2] + 0.5 / d[3]
    if eps:
        u = u + eps * (1.0 / d[0] ** 2 + 1.0 / d[1] ** 2 + 0.5 / d[2] ** 2 + 0.5 / d[3] ** 2)
    return u


def potential_parts(q1, q2, eps=0.0):
    """``(U, strong_force_part)`` evaluated pointwise."""
    d = pair_distances(q1, q2)
    u = 1.0 / d[0] + 1.0 / d[1] + 0.5 / d[2] + 0.5 / d[3]
    s = eps * (1.0 / d[0] ** 2 + 1.0 / d[1] ** 2 + 0.5 / d[2] ** 2 + 0.5 / d[3] ** 2)
    return u, s


def potential_gradient(q1, q2, eps=0.0):
    """Gradient of :func:`potential` with respect to ``q1`` and ``q2``."""
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    dm = q1 - q2
    dp = q1 + q2
    rm = np.linalg.norm(dm, axis=-1)[..., None]
    rp = np.linalg.norm(dp, axis=-1)[..., None]
    r1 = np.linalg.norm(q1, axis=-1)[..., None]
    r2 = np.linalg.norm(q2, axis=-1)[..., None]
    # d/dx of 1/|x| is -x/|x|^3, of 1/|x|^2 is -2x/|x|^4
    cm = 1.0 / rm**3
    cp = 1.0 / rp**3
    c1 = 0.5 / r1**3
    c2 = 0.5 / r2**3
    if eps:
        cm = cm + 2.0 * eps / rm**4
        cp = cp + 2.0 * eps / rp**4
        c1 = c1 + eps / r1**4
        c2 = c2 + eps / r2**4
    g1 = -cm * dm - cp * dp - c1 * q1
    g2 = cm * dm - cp * dp - c2 * q2
    return g1, g2


def acceleration_arrays(q1, q2):
    # U is a force function (positive), so the equations of motion are q'' = +grad U
    return potential_gradient(q1, q2)


def potential_U(c: Configuration) -> float:
    check_collision(c.q1, c.q2)
    return float(potential(c.q1, c.q2))


def acceleration(c: Configuration):
    """Accelerations ``(q1'', q2'')`` of the reduced system, ``+grad U``.

    ``q1'' = -q1/(2|q1|^3) - (q1-q2)/|q1-q2|^3 - (q1+q2)/|q1+q2|^3`` and the
    analogue for ``q2``.  These are the Euler-Lagrange equations of the
    action with the force function :func:`potential`.
    """
    check_collision(c.q1, c.q2)
    return acceleration_arrays(c.q1, c.q2)


def kinetic(p: PhasePoint) -> float:
    return 0.5 * float(p.p1 @ p.p1 + p.p2 @ p.p2)


def energy(p: PhasePoint) -> float:
    """Kinetic minus :func:`potential_U` (the reduced, i.e. half-system, energy)."""
    return kinetic(p) - potential_U(p.config)


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def angular_momentum(p: PhasePoint) -> float:
    """``q1 x p1 + q2 x p2``.

    This is half the angular momentum of the full four-body system, since
    bodies 3 and 4 contribute the same amount again.
    """
    c = p.config
    return float(_cross(c.q1, p.p1) + _cross(c.q2, p.p2))


def rhs(t, y):
    """First-order right-hand side on the flat 8-vector state."""
    a1, a2 = acceleration_arrays(y[0:2], y[2:4])
    return np.concatenate([y[4:8], a1, a2])


def energy_array(y):
    y = np.asarray(y, dtype=float)
    kin = 0.5 * np.sum(y[..., 4:8] ** 2, axis=-1)
    return kin - potential(y[..., 0:2], y[..., 2:4])


def angular_momentum_array(y):
    y = np.asarray(y, dtype=float)
    return _cross(y[..., 0:2], y[..., 4:6]) + _cross(y[..., 2:4], y[..., 6:8])
