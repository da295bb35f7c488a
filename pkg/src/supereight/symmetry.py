"""The symmetry group ``H = Z2 x D8`` and its action on loops.

An element carries three representations: ``tau`` on the time circle,
``rho`` on the plane and ``sigma`` on the body labels.  It acts on a loop of
four bodies by

    (g . q)_k(t) = rho(g) q_{sigma(g)^-1(k)}(tau(g)^-1 t).

The time circle is embedded as ``t -> (cos t, -sin t)``.  With that
orientation ``tau(g3)`` shifts time by ``-pi/2``, the fixed loops satisfy
``q2(t) = q1(t + pi/2)`` and the quarter-period boundary relation reads
``q2(pi/4) = R_x q1(pi/4)``, which is the relation obeyed by the explicit test
path.  With the counter-clockwise embedding the fixed loops would instead
satisfy ``q2(pi/4) = R_y q1(pi/4)``; the two conventions differ by the time
reversal ``t -> -t``.

Loops are stored in reduced form ``(q1, q2)`` with ``q3 = -q1``, ``q4 = -q2``.
This subspace is preserved by the whole group because ``g1`` is central.
All actions are applied exactly in coefficient space.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .pathspace import FourierLoop, mode_scale

P_X = np.array([[1.0, 0.0]])
P_Y = np.array([[0.0, 1.0]])
R_X = np.diag([1.0, -1.0])
R_Y = np.diag([-1.0, 1.0])

_CLOCKWISE = np.diag([1.0, -1.0])


@dataclass(frozen=True, eq=False)
class GroupElement:
    tau: np.ndarray
    rho: np.ndarray
    sigma: tuple  # sigma[i] is the image of body i (0-based)

    def __post_init__(self):
        for name in ("tau", "rho"):
            m = np.array(getattr(self, name), dtype=float)
            if m.shape != (2, 2) or not np.allclose(m @ m.T, np.eye(2), atol=1e-14):
                raise ValueError(f"{name} must be a 2x2 orthogonal matrix")
            m.setflags(write=False)
            object.__setattr__(self, name, m)
        sigma = tuple(int(i) for i in self.sigma)
        if sorted(sigma) != [0, 1, 2, 3]:
            raise ValueError(f"sigma must be a permutation of 0..3, got {sigma}")
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def identity(cls):
        return cls(np.eye(2), np.eye(2), (0, 1, 2, 3))

    def __matmul__(self, other):
        """Composition ``self * other`` (apply ``other`` first)."""
        return GroupElement(
            self.tau @ other.tau,
            self.rho @ other.rho,
            tuple(self.sigma[other.sigma[i]] for i in range(4)),
        )

    def inverse(self):
        inv = [0] * 4
        for i, j in enumerate(self.sigma):
            inv[j] = i
        return GroupElement(self.tau.T, self.rho.T, tuple(inv))

    def same_as(self, other, tol=1e-12):
        return (
            self.sigma == other.sigma
            and np.allclose(self.tau, other.tau, atol=tol)
            and np.allclose(self.rho, other.rho, atol=tol)
        )

    def permute(self, labels):
        """Apply ``sigma`` to a sequence of 1-based labels, e.g. ``(1,2,3,4)``."""
        return tuple(self.sigma[i - 1] + 1 for i in labels)

    def circle_map(self):
        """``(e, phi)`` such that ``tau`` acts on time as ``t -> e t + phi``."""
        b = _CLOCKWISE @ self.tau @ _CLOCKWISE
        e = 1 if np.linalg.det(b) > 0 else -1
        phi = float(np.arctan2(b[1, 0], b[0, 0]))
        return e, phi


G1 = GroupElement(np.eye(2), -np.eye(2), (2, 3, 0, 1))
G2 = GroupElement(np.diag([1.0, -1.0]), R_Y, (0, 3, 2, 1))
G3 = GroupElement(np.array([[0.0, -1.0], [1.0, 0.0]]), np.eye(2), (1, 2, 3, 0))
GENERATORS = (G1, G2, G3)


@dataclass(frozen=True)
class SymmetryGroup:
    elements: tuple

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def index(self, g, tol=1e-12):
        for i, h in enumerate(self.elements):
            if h.same_as(g, tol):
                return i
        raise KeyError("element not in group")

    def contains(self, g, tol=1e-12):
        try:
            self.index(g, tol)
        except KeyError:
            return False
        return True


def generate(generators):
    """Closure of ``generators`` under composition (breadth first)."""
    elements = [GroupElement.identity()]
    frontier = list(elements)
    while frontier:
        new = []
        for a in frontier:
            for g in generators:
                c = g @ a
                if not any(c.same_as(e) for e in elements):
                    elements.append(c)
                    new.append(c)
        frontier = new
    return SymmetryGroup(tuple(elements))


@lru_cache(maxsize=1)
def build_group():
    """The 16-element group generated by ``g1, g2, g3``."""
    return generate(GENERATORS)


def subgroup(*generators):
    return generate(generators)


def _mode_matrices(g: GroupElement, k):
    """Per-harmonic 8x8 matrices of the action on ``(xi[l], eta[l])``."""
    e, phi = g.inverse().circle_map()
    ell = np.arange(k + 1)
    cs = np.cos(ell * phi)
    sn = np.sin(ell * phi)
    # f(e t + phi) with f = xi sin(lt) + eta cos(lt):
    #   xi'  = e (xi cos(l phi) - eta sin(l phi))
    #   eta' = xi sin(l phi) + eta cos(l phi)
    time = np.zeros((k + 1, 2, 2))
    time[:, 0, 0] = e * cs
    time[:, 0, 1] = -e * sn
    time[:, 1, 0] = sn
    time[:, 1, 1] = cs

    sinv = g.inverse().sigma
    space = np.zeros((4, 4))
    for out in range(2):
        src = sinv[out]
        sign = 1.0 if src < 2 else -1.0
        red = src % 2
        space[2 * out:2 * out + 2, 2 * red:2 * red + 2] = sign * g.rho
    # vector layout per harmonic: (xi[0..3], eta[0..3])
    return np.einsum("lab,ij->laibj", time, space).reshape(k + 1, 8, 8)


def _apply(mats, x: FourierLoop):
    v = np.concatenate([x.xi, x.eta], axis=1)  # (k+1, 8)
    w = np.einsum("lij,lj->li", mats, v)
    return FourierLoop(w[:, :4], w[:, 4:])


def act_on_loop(g: GroupElement, x: FourierLoop) -> FourierLoop:
    return _apply(_mode_matrices(g, x.k), x)


@lru_cache(maxsize=16)
def _projector(k):
    mats = sum(_mode_matrices(g, k) for g in build_group()) / len(build_group())
    mats.setflags(write=False)
    return mats


def equivariant_project(x: FourierLoop) -> FourierLoop:
    """Average of ``g . x`` over the group; the image is fixed by every element."""
    return _apply(_projector(x.k), x)


def is_fixed(x: FourierLoop, tol=1e-10):
    return (x - equivariant_project(x)).h1_norm() <= tol * max(1.0, x.h1_norm())


def symmetry_defect(x: FourierLoop):
    """Largest H^1 distance ``|g . x - x|`` over the three generators."""
    return max((act_on_loop(g, x) - x).h1_norm() for g in GENERATORS)


# --- boundary conditions of the quarter-period segment -----------------------

@dataclass(frozen=True)
class BoundaryResidual:
    px_q1_0: float  # |P_x q1(0)|
    py_q2_0: float  # |P_y q2(0)|
    rect_pi4: float  # |q2(pi/4) - R_x q1(pi/4)|
    py_q1_0: float  # signed, must be >= 0
    px_q2_0: float  # signed, must be >= 0
    px_q1_pi4: float  # signed, must be >= 0
    py_q1_pi4: float  # signed, must be <= 0

    def equality_max(self):
        return max(self.px_q1_0, self.py_q2_0, self.rect_pi4)

    def signs(self):
        return np.array([self.py_q1_0, self.px_q2_0, self.px_q1_pi4, self.py_q1_pi4])

    def in_omega(self, strict=True):
        s = self.signs()
        if strict:
            return bool(s[0] > 0 and s[1] > 0 and s[2] > 0 and s[3] < 0)
        return bool(s[0] >= 0 and s[1] >= 0 and s[2] >= 0 and s[3] <= 0)


def _boundary_from_points(q0, q4):
    q1a, q2a = np.asarray(q0[0:2]), np.asarray(q0[2:4])
    q1b, q2b = np.asarray(q4[0:2]), np.asarray(q4[2:4])
    return BoundaryResidual(
        px_q1_0=abs(float(q1a[0])),
        py_q2_0=abs(float(q2a[1])),
        rect_pi4=float(np.linalg.norm(q2b - R_X @ q1b)),
        py_q1_0=float(q1a[1]),
        px_q2_0=float(q2a[0]),
        px_q1_pi4=float(q1b[0]),
        py_q1_pi4=float(q1b[1]),
    )


def boundary_residual(x: FourierLoop) -> BoundaryResidual:
    return _boundary_from_points(x.positions(0.0), x.positions(np.pi / 4))


def omega_signs(x: FourierLoop):
    """``(P_y q1(0), P_x q2(0), P_x q1(pi/4), P_y q1(pi/4))``."""
    return boundary_residual(x).signs()


# --- segment <-> loop ---------------------------------------------------------

class BoundaryError(ValueError):
    pass


def check_segment(q1, q2, tol=1e-8):
    """Raise :class:`BoundaryError` naming the first violated boundary condition."""
    q0 = np.concatenate([q1[0], q2[0]])
    q4 = np.concatenate([q1[-1], q2[-1]])
    r = _boundary_from_points(q0, q4)
    if r.px_q1_0 > tol or r.py_q2_0 > tol:
        raise BoundaryError(
            f"rhomboidal condition violated at t=0: P_x q1(0)={q1[0][0]:.3g}, P_y q2(0)={q2[0][1]:.3g}")
    if r.rect_pi4 > tol:
        raise BoundaryError(f"rectangular condition violated at t=pi/4: |q2 - R_x q1| = {r.rect_pi4:.3g}")
    s = r.signs()
    names = ("P_y q1(0) >= 0", "P_x q2(0) >= 0", "P_x q1(pi/4) >= 0", "P_y q1(pi/4) <= 0")
    bad = [s[0] < -tol, s[1] < -tol, s[2] < -tol, s[3] > tol]
    for name, b in zip(names, bad):
        if b:
            raise BoundaryError(f"sign condition violated: {name}")
    return r


def _odd_modes(k):
    return np.arange(1, k + 1, 2)


def segment_to_loop(t, q1, q2, k=None, tol=1e-8) -> FourierLoop:
    """Symmetric loop whose restriction to ``[0, pi/4]`` fits the samples.

    ``t`` must span ``[0, pi/4]`` (first and last samples sit on the two
    boundaries).  Fixed loops are determined by ``q1x = sum a_l sin(l t)`` and
    ``q1y = sum b_l cos(l t)`` over odd ``l``, with ``q2(t) = q1(t + pi/2)``.
    For ``n + 1`` uniform samples the default ``k = 4n - 1`` makes the fit an
    exact interpolation.
    """
    t = np.asarray(t, dtype=float)
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    if abs(t[0]) > 1e-14 or abs(t[-1] - np.pi / 4) > 1e-12:
        raise BoundaryError("segment samples must start at t=0 and end at t=pi/4")
    check_segment(q1, q2, tol)
    if k is None:
        k = 4 * (len(t) - 1) - 1
    ell = _odd_modes(k)
    sgn = np.sin(ell * np.pi / 2)  # +-1 for odd l
    arg = np.outer(t, ell)
    # q2x(t) = sum a_l sgn_l cos(l t),  q2y(t) = -sum b_l sgn_l sin(l t)
    ax = np.vstack([np.sin(arg), np.cos(arg) * sgn])
    ay = np.vstack([np.cos(arg), -np.sin(arg) * sgn])
    a = np.linalg.lstsq(ax, np.concatenate([q1[:, 0], q2[:, 0]]), rcond=None)[0]
    b = np.linalg.lstsq(ay, np.concatenate([q1[:, 1], q2[:, 1]]), rcond=None)[0]
    c = mode_scale(k)[ell]
    xi = np.zeros((k + 1, 4))
    eta = np.zeros((k + 1, 4))
    xi[ell, 0] = a / c
    eta[ell, 1] = b / c
    eta[ell, 2] = a * sgn / c
    xi[ell, 3] = -b * sgn / c
    return FourierLoop(xi, eta)


def loop_to_segment(x: FourierLoop, t=None, n=64):
    """Samples ``(t, q1, q2)`` of the loop on ``[0, pi/4]``."""
    if t is None:
        t = np.linspace(0.0, np.pi / 4, n + 1)
    q = x.positions(np.asarray(t, dtype=float))
    return t, q[:, 0:2], q[:, 2:4]
