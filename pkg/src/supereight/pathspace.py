"""Truncated trigonometric loops ``t -> (q1(t), q2(t))`` on ``[0, 2*pi]``.

A loop of truncation ``k`` stores two ``(k+1, 4)`` arrays.  Column ``j`` indexes
the components ``(q1x, q1y, q2x, q2y)`` and row ``l`` the harmonic, with basis
functions ``sin(l t) * c_l`` (``xi``) and ``cos(l t) * c_l`` (``eta``) where
``c_l = 1/sqrt(pi (1 + l^2))`` and ``c_0 = 1/sqrt(2 pi)``.  This basis is
orthonormal for the H^1 inner product ``int (x.y + x'.y') dt``, so the H^1
norm of a loop is the Euclidean norm of its coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import simpson

TWO_PI = 2.0 * np.pi


def mode_scale(k):
    """The normalization ``c_l`` for ``l = 0..k``."""
    ell = np.arange(k + 1, dtype=float)
    c = 1.0 / np.sqrt(np.pi * (1.0 + ell**2))
    c[0] = 1.0 / np.sqrt(TWO_PI)
    return c


@dataclass(frozen=True, eq=False)
class FourierLoop:
    xi: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        xi = np.array(self.xi, dtype=float)
        eta = np.array(self.eta, dtype=float)
        if xi.ndim != 2 or xi.shape[1] != 4 or xi.shape != eta.shape:
            raise ValueError(f"coefficient arrays must both be (k+1, 4), got {xi.shape} and {eta.shape}")
        if xi.shape[0] < 2:
            raise ValueError("truncation order must be at least 1")
        xi[0] = 0.0  # sin(0 t) vanishes identically
        xi.setflags(write=False)
        eta.setflags(write=False)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "eta", eta)

    @classmethod
    def zeros(cls, k):
        return cls(np.zeros((k + 1, 4)), np.zeros((k + 1, 4)))

    @classmethod
    def from_vector(cls, v, k):
        v = np.asarray(v, dtype=float).reshape(2, k + 1, 4)
        return cls(v[0], v[1])

    @property
    def k(self):
        return self.xi.shape[0] - 1

    def vector(self):
        """Flat coefficient vector ``(xi, eta)``; its 2-norm is the H^1 norm."""
        return np.concatenate([self.xi.ravel(), self.eta.ravel()])

    def h1_norm(self):
        return float(np.linalg.norm(self.vector()))

    def h1_inner(self, other):
        return float(self.vector() @ other.vector())

    def resized(self, k):
        """Truncate or zero-pad to order ``k``."""
        xi = np.zeros((k + 1, 4))
        eta = np.zeros((k + 1, 4))
        n = min(k, self.k) + 1
        xi[:n] = self.xi[:n]
        eta[:n] = self.eta[:n]
        return FourierLoop(xi, eta)

    def __add__(self, other):
        return FourierLoop(self.xi + other.xi, self.eta + other.eta)

    def __sub__(self, other):
        return FourierLoop(self.xi - other.xi, self.eta - other.eta)

    def __mul__(self, a):
        return FourierLoop(a * self.xi, a * self.eta)

    __rmul__ = __mul__

    def __neg__(self):
        return FourierLoop(-self.xi, -self.eta)

    def _basis(self, t):
        t = np.asarray(t, dtype=float)
        ell = np.arange(self.k + 1)
        arg = t[..., None] * ell
        c = mode_scale(self.k)
        return np.sin(arg) * c, np.cos(arg) * c, c

    def positions(self, t):
        """Array of shape ``t.shape + (4,)`` holding ``(q1x, q1y, q2x, q2y)``."""
        s, c, _ = self._basis(t)
        return s @ self.xi + c @ self.eta

    def velocities(self, t):
        s, c, _ = self._basis(t)
        ell = np.arange(self.k + 1)
        return (c * ell) @ self.xi - (s * ell) @ self.eta

    def evaluate(self, t):
        """Configuration at a single time."""
        from .dynamics import Configuration

        q = self.positions(float(t))
        return Configuration(q[0:2], q[2:4])

    def evaluate_velocity(self, t):
        v = self.velocities(float(t))
        return v[0:2], v[2:4]

    def state(self, t):
        """Flat phase-space state ``(q1, q2, q1', q2')`` at time ``t``."""
        return np.concatenate([self.positions(float(t)), self.velocities(float(t))])

    def bodies(self, t):
        """All four body positions, shape ``t.shape + (4, 2)``."""
        q = self.positions(t)
        q1 = q[..., 0:2]
        q2 = q[..., 2:4]
        return np.stack([q1, q2, -q1, -q2], axis=-2)


@lru_cache(maxsize=32)
def grid_basis(k, m):
    """Basis values on the uniform grid ``t_i = 2 pi i / m``.

    Returns ``(t, S, C, dS, dC)`` with ``S[i, l] = c_l sin(l t_i)`` and
    ``dS``, ``dC`` the time derivatives of the basis functions.
    """
    t = TWO_PI * np.arange(m) / m
    ell = np.arange(k + 1)
    c = mode_scale(k)
    arg = np.outer(t, ell)
    s = np.sin(arg) * c
    co = np.cos(arg) * c
    out = (t, s, co, co * ell, -s * ell)
    for a in out:
        a.setflags(write=False)
    return out


def sample(x: FourierLoop, m):
    """Positions and velocities of ``x`` on the uniform ``m``-point grid."""
    t, s, c, ds, dc = grid_basis(x.k, m)
    return t, s @ x.xi + c @ x.eta, ds @ x.xi + dc @ x.eta


def quadrature(f, period=TWO_PI):
    """Trapezoid rule for periodic samples on a uniform grid without the endpoint.

    Spectrally accurate for smooth periodic integrands.
    """
    f = np.asarray(f, dtype=float)
    if f.shape[-1] < 2:
        raise ValueError("need at least two samples")
    return period * np.mean(f, axis=-1)


def segment_quadrature(f, length):
    """Composite Simpson rule for ``m + 1`` samples spanning an interval of ``length``."""
    f = np.asarray(f, dtype=float)
    n = f.shape[-1]
    if n < 3:
        raise ValueError("need at least three samples")
    return simpson(f, dx=length / (n - 1), axis=-1)


def h1_quadrature(x: FourierLoop, m=512):
    """``int_0^{2 pi} |q|^2 + |q'|^2 dt`` by direct quadrature of samples."""
    _, q, v = sample(x, m)
    return float(quadrature(np.sum(q**2, axis=-1) + np.sum(v**2, axis=-1)))


def random_init(seed, k=32, amplitude=2.0, min_separation=0.01, max_draws=10000):
    """Random symmetric starting loop satisfying the sign conditions of the search region.

    Coefficients are i.i.d. uniform in ``[-amplitude, amplitude]`` and damped
    by ``l**-2``, then averaged over the symmetry group.  The two reflections
    ``q -> R_x q`` and ``q -> R_y q`` of the whole loop keep it symmetric and
    flip the signs of ``(q1y(0), q1y(pi/4))`` and ``(q2x(0), q1x(pi/4))`` in
    pairs; they are used to reach ``q1y(0) > 0, q2x(0) > 0``.  Draws whose
    remaining two signs are wrong, or which pass within ``min_separation`` of a
    collision, are rejected and redrawn from the same generator.
    """
    from .dynamics import body_separations
    from .symmetry import equivariant_project, omega_signs

    rng = np.random.default_rng(seed)
    damp = 1.0 / np.maximum(np.arange(k + 1), 1) ** 2
    for _ in range(max_draws):
        xi = rng.uniform(-amplitude, amplitude, (k + 1, 4)) * damp[:, None]
        eta = rng.uniform(-amplitude, amplitude, (k + 1, 4)) * damp[:, None]
        x = equivariant_project(FourierLoop(xi, eta))
        s = omega_signs(x)
        flip_y = s[0] < 0  # R_x: negates every y component
        flip_x = s[1] < 0  # R_y: negates every x component
        sign = np.array([-1.0 if flip_x else 1.0, -1.0 if flip_y else 1.0] * 2)
        x = FourierLoop(x.xi * sign, x.eta * sign)
        s = omega_signs(x)
        if not (s[0] > 0 and s[1] > 0 and s[2] > 0 and s[3] < 0):
            continue
        _, q, _ = sample(x, 256)
        if np.min(body_separations(q[:, 0:2], q[:, 2:4])) < min_separation:
            continue
        return x
    raise RuntimeError(f"no admissible draw in {max_draws} attempts (seed={seed})")
