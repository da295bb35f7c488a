"""Near-collision analysis: the blow-up (scaling) ODE and Levi-Civita regularization.

Scaling limit
-------------
``y'' + k y/|y|^3 + 2 d y/|y|^4 = 0`` with ``y(0) = (0, 1)`` and
``y'(0) = +-sqrt(2(1+d)) (1, 0)``.  ``k = 1/2`` is the coefficient that
comes out of the reduced problem; ``k`` is a parameter so that the zero
energy case ``k = 1`` can be studied as well.  The force is central, so
energy ``1/2|y'|^2 - k/|y| - d/|y|^2`` and ``h = y x y'`` are conserved and
the escape angle has the closed form :func:`limit_angle`.

Angles are the usual polar angle of ``y``, unwrapped, so ``theta(0) = pi/2``.

Levi-Civita
-----------
``q1 = -(i/2) z^2``, ``p1 = -i w / conj(z)``, ``dt = |z|^2 dtau``, with
complex numbers standing for planar vectors.  Then ``|q1 -+ q2| =
|z^2 -+ 2i q2| / 2`` and the binary collision ``q1 = 0`` is a regular
point of the flow in ``tau``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp

from .dynamics import CollisionError, PhasePoint

REDUCED_KEPLER = 0.5


# ---------------------------------------------------------------- scaling ODE

def _branch_sign(branch):
    if branch in (1, "+", "plus"):
        return 1.0
    if branch in (-1, "-", "minus"):
        return -1.0
    raise ValueError(f"branch must be '+' or '-', got {branch!r}")


def theta_asymptote(d, branch="+"):
    """``pi/2 -+ pi sqrt(1+d)``: the reference escape direction for the scaling ODE."""
    if d < 0:
        raise ValueError("d must be non-negative")
    return math.pi / 2 - _branch_sign(branch) * math.pi * math.sqrt(1.0 + d)


def limit_angle(d, branch="+", kepler_coefficient=REDUCED_KEPLER):
    """Exact ``lim theta(s)`` for :func:`integrate_scaling` with the same arguments.

    With ``u = 1/r`` the swept angle is ``sqrt(1+d) * int_0^1 du /
    sqrt((1-u)(u+1-k))`` which equals ``sqrt(1+d) (pi/2 + asin(k/(2-k)))``.
    It agrees with :func:`theta_asymptote` only for ``k = 1``.
    """
    k = kepler_coefficient
    if d < 0 or not 0 < k < 2:
        raise ValueError("need d >= 0 and 0 < kepler_coefficient < 2")
    sweep = math.sqrt(1.0 + d) * (math.pi / 2 + math.asin(k / (2.0 - k)))
    return math.pi / 2 - _branch_sign(branch) * sweep


def y_infinity(s, branch="+"):
    """``(cos sqrt2 s, +-sin sqrt2 s)``, a unit-circle solution of ``y'' + 2y/|y|^4 = 0``.

    Its phase differs by a quarter turn from the initial data ``y(0) = (0, 1)``.
    """
    s = np.asarray(s, dtype=float)
    a = math.sqrt(2.0) * s
    return np.stack([np.cos(a), _branch_sign(branch) * np.sin(a)], axis=-1)


def _scaling_rhs(k, d):
    # state (y, y', theta); theta' = (y x y')/|y|^2 keeps the angle unwrapped
    def f(s, u):
        y0, y1, v0, v1 = u[0], u[1], u[2], u[3]
        r2 = y0 * y0 + y1 * y1
        r = math.sqrt(r2)
        c = k / (r * r2) + 2.0 * d / (r2 * r2)
        return np.array([v0, v1, -c * y0, -c * y1, (y0 * v1 - y1 * v0) / r2])

    return f


@dataclass
class ScalingTrajectory:
    d: float
    branch: float
    kepler_coefficient: float
    s: np.ndarray
    y: np.ndarray  # (n, 2)
    ydot: np.ndarray  # (n, 2)
    r: np.ndarray
    theta: np.ndarray  # unwrapped polar angle, theta(0) = pi/2

    def energy(self):
        v2 = np.sum(self.ydot**2, axis=1)
        return 0.5 * v2 - self.kepler_coefficient / self.r - self.d / self.r**2

    def angular_momentum(self):
        return self.y[:, 0] * self.ydot[:, 1] - self.y[:, 1] * self.ydot[:, 0]

    def energy_drift(self):
        e = self.energy()
        return float(np.max(np.abs(e - e[0])))

    def theta_final(self):
        return float(self.theta[-1])

    def remaining_sweep(self):
        """Angle still to be swept after the last sample, by quadrature in ``u = 1/r``.

        Uses the conserved energy and angular momentum.  Requires the orbit
        to be outbound at the last sample.
        """
        e = float(self.energy()[0])
        h = float(self.angular_momentum()[0])
        k, d = self.kepler_coefficient, self.d
        u_end = 1.0 / self.r[-1]

        def f(u):
            return abs(h) / math.sqrt(max(2 * e + 2 * k * u + (2 * d - h * h) * u * u, 0.0))

        val, _ = quad(f, 0.0, u_end, epsabs=1e-14, epsrel=1e-13, limit=200)
        return math.copysign(val, h)

    def extrapolated_theta(self):
        """``theta(s_max)`` plus the remaining sweep: the limit direction."""
        return self.theta_final() + self.remaining_sweep()


def integrate_scaling(d, branch="+", s_max=1e3, tol=1e-12, kepler_coefficient=REDUCED_KEPLER,
                      n_samples=2001):
    """Integrate the scaling ODE with DOP853 and sample on a log-spaced ``s`` grid."""
    if not (d >= 0 and math.isfinite(d)):
        raise ValueError("d must be finite and non-negative")
    if s_max <= 0:
        raise ValueError("s_max must be positive")
    sign = _branch_sign(branch)
    u0 = np.array([0.0, 1.0, sign * math.sqrt(2.0 * (1.0 + d)), 0.0, math.pi / 2])
    s = np.concatenate([[0.0], np.geomspace(1e-4 * s_max, s_max, n_samples - 1)])
    sol = solve_ivp(_scaling_rhs(kepler_coefficient, d), (0.0, s_max), u0, method="DOP853",
                    rtol=tol, atol=tol * 1e-2, t_eval=s)
    if sol.status != 0:
        raise RuntimeError(f"scaling integration failed: {sol.message}")
    y = sol.y[0:2].T
    return ScalingTrajectory(float(d), sign, float(kepler_coefficient), sol.t, y, sol.y[2:4].T,
                             np.hypot(y[:, 0], y[:, 1]), sol.y[4])


# ------------------------------------------------------------------ Levi-Civita

@dataclass(frozen=True)
class LCState:
    """Regularized state.  ``(z, w)`` and ``(-z, -w)`` describe the same physical point."""

    z: complex
    w: complex
    q2: complex
    p2: complex
    E: float

    def as_real(self):
        return np.array([self.z.real, self.z.imag, self.w.real, self.w.imag,
                         self.q2.real, self.q2.imag, self.p2.real, self.p2.imag])

    @classmethod
    def from_real(cls, u, E):
        return cls(complex(u[0], u[1]), complex(u[2], u[3]), complex(u[4], u[5]), complex(u[6], u[7]), float(E))


def _c(v):
    v = np.asarray(v, dtype=float)
    return complex(v[0], v[1])


def _v(c):
    return np.array([c.real, c.imag])


def lc_energy(z, w, q2, p2):
    """The energy relation; needs ``z != 0``."""
    z2 = z * z
    return ((abs(w) ** 2 - 2.0) / (2.0 * abs(z) ** 2) + 0.5 * abs(p2) ** 2
            - 2.0 / abs(z2 - 2j * q2) - 2.0 / abs(z2 + 2j * q2) - 0.5 / abs(q2))


def lc_transform(p: PhasePoint) -> LCState:
    """Phase point to LC state, on the branch ``Re z >= 0``."""
    q1 = _c(p.config.q1)
    if q1 == 0:
        raise CollisionError("q1", 0.0)
    z = np.sqrt(2j * q1)  # principal root has Re z >= 0
    w = 1j * _c(p.p1) * np.conj(z)
    q2, p2 = _c(p.config.q2), _c(p.p2)
    return LCState(complex(z), complex(w), q2, p2, float(lc_energy(z, w, q2, p2)))


def lc_inverse(s: LCState) -> PhasePoint:
    if s.z == 0:
        raise CollisionError("q1", 0.0)
    q1 = -0.5j * s.z * s.z
    p1 = -1j * s.w / np.conj(s.z)
    return PhasePoint.from_array(np.concatenate([_v(q1), _v(s.q2), _v(p1), _v(s.p2)]))


def lc_derivatives(z, w, q2, p2, E):
    """``(dz, dw, dq2, dp2)`` with respect to ``tau``."""
    z2 = z * z
    am = z2 - 2j * q2
    ap = z2 + 2j * q2
    ram, rap, r2 = abs(am), abs(ap), abs(q2)
    if r2 == 0 or ram == 0 or rap == 0:
        raise CollisionError("secondary", min(r2, ram, rap))
    nz = abs(z) ** 2
    dw = (z * (2 * E - abs(p2) ** 2 + 4 / ram + 4 / rap + 1 / r2)
          - 4 * nz * np.conj(z) * (am / ram**3 + ap / rap**3))
    dp2 = nz * (-q2 / (2 * r2**3) - 4j * am / ram**3 + 4j * ap / rap**3)
    return w, dw, nz * p2, dp2


def lc_rhs(s: LCState) -> LCState:
    """Derivative of ``s`` in ``tau``, packaged as an LCState (``E`` slot is 0)."""
    dz, dw, dq2, dp2 = lc_derivatives(s.z, s.w, s.q2, s.p2, s.E)
    return LCState(complex(dz), complex(dw), complex(dq2), complex(dp2), 0.0)


SECONDARY_FLOOR = 1e-8


def _lc_system(E):
    def f(tau, u):
        z, w, q2, p2 = complex(u[0], u[1]), complex(u[2], u[3]), complex(u[4], u[5]), complex(u[6], u[7])
        dz, dw, dq2, dp2 = lc_derivatives(z, w, q2, p2, E)
        return np.array([dz.real, dz.imag, dw.real, dw.imag, dq2.real, dq2.imag,
                         dp2.real, dp2.imag, abs(z) ** 2])

    def secondary(tau, u):
        z, q2 = complex(u[0], u[1]), complex(u[4], u[5])
        return min(abs(q2), abs(z * z - 2j * q2), abs(z * z + 2j * q2)) - SECONDARY_FLOOR

    secondary.terminal = True
    return f, secondary


def default_energy(q2_0, p2_0):
    """The ``E`` for which ``(|w|^2 - 2)/(2|z|^2) -> 0`` at the collision, i.e. a
    parabolic binary ejection: ``|p2|^2/2 - 5/(2|q2|)``."""
    return 0.5 * abs(p2_0) ** 2 - 2.5 / abs(q2_0)


@dataclass
class CollisionPath:
    """Samples on both sides of the collision at ``tau = 0``."""

    tau: np.ndarray
    t: np.ndarray
    z: np.ndarray
    w: np.ndarray
    q2: np.ndarray
    p2: np.ndarray
    E: float

    @property
    def q1(self):
        return -0.5j * self.z**2

    def p1(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            return -1j * self.w / np.conj(self.z)

    def energy_residual(self, min_abs_z=1e-3):
        """``max |E_relation - E|`` over samples with ``|z| > min_abs_z``."""
        m = np.abs(self.z) > min_abs_z
        e = np.array([lc_energy(*a) for a in zip(self.z[m], self.w[m], self.q2[m], self.p2[m])])
        return float(np.max(np.abs(e - self.E))) if e.size else 0.0

    def phase_point(self, i):
        return lc_inverse(LCState(complex(self.z[i]), complex(self.w[i]), complex(self.q2[i]),
                                  complex(self.p2[i]), self.E))


def integrate_through_collision(q2_0, p2_0, tau_span=(-0.5, 0.5), tol=1e-12, E=None, n=1001):
    """Integrate the regularized system from the collision ``z = 0, w = sqrt2``
    forwards and backwards in ``tau``, together with ``t`` from ``dt = |z|^2 dtau``."""
    q2_0, p2_0 = complex(q2_0), complex(p2_0)
    if q2_0 == 0:
        raise ValueError("q2_0 must be nonzero")
    lo, hi = tau_span
    if not lo < 0 < hi:
        raise ValueError("tau_span must contain 0 in its interior")
    E = default_energy(q2_0, p2_0) if E is None else float(E)
    u0 = np.array([0.0, 0.0, math.sqrt(2.0), 0.0, q2_0.real, q2_0.imag, p2_0.real, p2_0.imag, 0.0])
    f, ev = _lc_system(E)
    tau = np.linspace(lo, hi, n)
    if 0.0 not in tau:
        tau = np.sort(np.append(tau, 0.0))
    parts = []
    for end, grid in ((hi, tau[tau >= 0]), (lo, tau[tau <= 0][::-1])):
        sol = solve_ivp(f, (0.0, end), u0, method="DOP853", rtol=tol, atol=tol * 1e-2,
                        t_eval=grid, events=ev)
        if sol.status == 1:
            te = float(sol.t_events[0][0])
            raise CollisionError("secondary", SECONDARY_FLOOR, te)
        if sol.status != 0:
            raise RuntimeError(f"LC integration failed: {sol.message}")
        parts.append((sol.t, sol.y))
    (tf, yf), (tb, yb) = parts
    t_all = np.concatenate([tb[::-1][:-1], tf])
    y = np.concatenate([yb[:, ::-1][:, :-1], yf], axis=1)
    cz = y[0] + 1j * y[1]
    return CollisionPath(t_all, y[8], cz, y[2] + 1j * y[3], y[4] + 1j * y[5], y[6] + 1j * y[7], E)


@dataclass(frozen=True)
class QuadrantResult:
    sign: int  # sign of the component of q1 transverse to the ejection direction, 0 if indeterminate
    transverse: float
    im_b3: float
    indeterminate: bool

    @property
    def expected(self):
        return -int(np.sign(self.im_b3))

    @property
    def rule_holds(self):
        return not self.indeterminate and self.sign == self.expected


def quadrant_diagnostic(q2_0, p2_0, tau_probe=0.3, tol=1e-12, noise_floor=1e-11):
    """Side of the ejection axis on which ``q1`` leaves the collision.

    ``q1`` is ejected along ``-i`` (the negative y-axis), so its imaginary part
    is ``-tau^2`` at leading order.  The side is decided by ``Re q1``, which is
    ``sqrt2 * Im(a_10) * tau^11 + ...`` for ``z = sum a_k tau^k``.  The rule
    under test is ``sign(Re q1) = -sign(Im b3)`` with ``b3 = (2/3) p2(0)``.
    """
    if complex(p2_0) == 0:
        raise ValueError("p2_0 must be nonzero")
    path = integrate_through_collision(q2_0, p2_0, (-tau_probe, tau_probe), tol, n=3)
    x = float(path.q1[-1].real)
    indeterminate = abs(x) < noise_floor
    return QuadrantResult(0 if indeterminate else int(np.sign(x)), x,
                          float((2.0 / 3.0) * complex(p2_0).imag), indeterminate)
