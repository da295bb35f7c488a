"""Projected Sobolev steepest descent with strong-force continuation.

Each rung of the ``eps`` ladder runs the explicit Euler discretization of the
gradient flow ``x' = -grad J_eps(x)`` inside the symmetric subspace, warm
started from the previous rung.  The last rung has ``eps = 0``.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .action import DEFAULT_QUADRATURE, ActionValue, action_loop, value_and_gradient
from .dynamics import CollisionError
from .pathspace import FourierLoop, grid_basis, random_init
from .symmetry import boundary_residual, equivariant_project

log = logging.getLogger(__name__)

SEGMENTS_PER_PERIOD = 8


def default_ladder(n=16, eps0=0.1):
    return tuple(eps0 * 2.0**-i for i in range(n + 1)) + (0.0,)


@dataclass(frozen=True)
class Schedule:
    eps_ladder: tuple = field(default_factory=default_ladder)
    step: float = 0.05
    max_iters: int = 20000
    grad_tol: float = 1e-7
    collision_floor: float = 1e-3
    # step multiplier after an accepted step; 1.0 is the plain fixed-step Euler flow
    growth: float = 1.2
    max_step: float = 2.0
    # gradient tolerance on the eps > 0 rungs; None means grad_tol
    rung_tol: float | None = 1e-5

    def __post_init__(self):
        lad = tuple(float(e) for e in self.eps_ladder)
        if not lad or lad[-1] != 0.0:
            raise ValueError("eps ladder must end at 0")
        if any(b >= a for a, b in zip(lad, lad[1:])):
            raise ValueError("eps ladder must be strictly decreasing")
        if self.step <= 0 or self.max_step < self.step:
            raise ValueError("need 0 < step <= max_step")
        if self.max_iters < 0 or self.grad_tol <= 0 or self.collision_floor < 0:
            raise ValueError("max_iters, grad_tol and collision_floor must be non-negative")
        if self.growth < 1.0:
            raise ValueError("growth must be >= 1")
        object.__setattr__(self, "eps_ladder", lad)

    def tol_for(self, eps):
        if eps == 0.0 or self.rung_tol is None:
            return self.grad_tol
        return max(self.rung_tol, self.grad_tol)


class RestartSignal(RuntimeError):
    """The descent came closer to a collision than ``collision_floor``."""

    def __init__(self, message, rung=None):
        super().__init__(message)
        self.rung = rung
        self.rows = []


@dataclass
class DescentResult:
    loop: FourierLoop
    value: float  # loop action J_eps over [0, 2 pi]
    grad_norm: float
    min_separation: float
    iterations: int
    converged: bool


@dataclass
class OrbitResult:
    loop: FourierLoop
    action: ActionValue  # eps = 0, quarter-period (segment) units
    eps_history: list  # [(eps, J_eps over [0, pi/4])]
    min_separation: float
    grad_norm: float
    omega_signs: np.ndarray
    converged: bool
    seed: int | None = None
    iterations: int = 0
    status: str = ""
    log_rows: list = field(default_factory=list, repr=False)

    def in_omega(self):
        s = self.omega_signs
        return bool(s[0] > 0 and s[1] > 0 and s[2] > 0 and s[3] < 0)


def _pair_vectors(x: FourierLoop, m):
    """``q1 - q2, q1 + q2, q1, q2`` on the quadrature grid, shape (4, m, 2)."""
    _, s, c, _, _ = grid_basis(x.k, m)
    q = s @ x.xi + c @ x.eta
    q1, q2 = q[:, 0:2], q[:, 2:4]
    return np.stack([q1 - q2, q1 + q2, q1, q2])


def max_safe_step(x: FourierLoop, direction: FourierLoop, m, fraction=0.5):
    """Largest ``h`` such that ``x - h * direction`` moves no pair vector by more
    than ``fraction`` of its current length at any grid time.

    Along such a step no pair distance can vanish, so an iterate cannot jump
    across the collision set, which the continuous flow never crosses.
    """
    base = np.linalg.norm(_pair_vectors(x, m), axis=-1)
    move = np.linalg.norm(_pair_vectors(direction, m), axis=-1)
    ratio = np.max(move / base)
    return np.inf if ratio == 0 else fraction / ratio


def descend(x0: FourierLoop, eps, schedule: Schedule = Schedule(), m=DEFAULT_QUADRATURE,
            tol=None, record=None):
    """Monotone projected Euler descent on ``J_eps``.

    Iterates ``x <- P(x - h grad)``.  A step that would raise the action (or hit
    a collision on the quadrature grid) is retried with ``h / 2``; an accepted
    step lets ``h`` grow by ``schedule.growth`` up to ``schedule.max_step``.
    Each trial step is also capped by :func:`max_safe_step`.
    Stops when the gradient norm drops below ``tol`` (default
    ``schedule.tol_for(eps)``), when the step underflows, or after
    ``schedule.max_iters`` iterations.

    ``record(iteration, value, grad_norm, min_sep)`` is called once per
    accepted iterate, including the starting point.
    """
    tol = schedule.tol_for(eps) if tol is None else tol
    x = equivariant_project(x0)
    f, g, dmin = value_and_gradient(x, eps, m)
    g = equivariant_project(g)
    gn = g.h1_norm()
    if record:
        record(0, f, gn, dmin)
    h = schedule.step
    it = 0
    while gn >= tol and it < schedule.max_iters:
        h = min(h, max_safe_step(x, g, m))
        while True:
            y = equivariant_project(x - h * g)
            try:
                fy, gy, dy = value_and_gradient(y, eps, m)
            except CollisionError:
                fy = np.inf
            if fy <= f:
                break
            h *= 0.5
            if h < 1e-14:
                break
        if not fy <= f:
            log.debug("step underflow at iteration %d, |grad| = %.3e", it, gn)
            break
        it += 1
        x, f, dmin = y, fy, dy
        g = equivariant_project(gy)
        gn = g.h1_norm()
        if record:
            record(it, f, gn, dmin)
        if dmin < schedule.collision_floor:
            raise RestartSignal(f"separation {dmin:.3e} below floor at iteration {it} (eps={eps:g})")
        h = min(h * schedule.growth, schedule.max_step)
    return DescentResult(x, f, gn, dmin, it, bool(gn < tol))


def continuation(x0: FourierLoop, schedule: Schedule = Schedule(), m=DEFAULT_QUADRATURE,
                 seed=None) -> OrbitResult:
    """Descend on every rung of the ``eps`` ladder, warm-starting each from the last."""
    x = equivariant_project(x0)
    history = []
    rows = []
    total = 0
    res = None
    for rung, eps in enumerate(schedule.eps_ladder):
        def record(i, f, gn, dmin, eps=eps):
            rows.append((seed, rung, eps, i, f / SEGMENTS_PER_PERIOD, gn, dmin))

        try:
            res = descend(x, eps, schedule, m, record=record)
        except RestartSignal as exc:
            exc.rung = rung
            exc.rows = rows
            raise
        x = res.loop
        total += res.iterations
        history.append((eps, res.value / SEGMENTS_PER_PERIOD))
        log.info("seed %s rung %d eps=%.3g J=%.12f |grad|=%.2e iters=%d",
                 seed, rung, eps, res.value / SEGMENTS_PER_PERIOD, res.grad_norm, res.iterations)

    value = action_loop(x, 0.0, m).scaled(1.0 / SEGMENTS_PER_PERIOD)
    signs = boundary_residual(x).signs()
    out = OrbitResult(
        loop=x,
        action=value,
        eps_history=history,
        min_separation=res.min_separation,
        grad_norm=res.grad_norm,
        omega_signs=signs,
        converged=False,
        seed=seed,
        iterations=total,
        log_rows=rows,
    )
    if not res.converged:
        out.status = "gradient tolerance not reached"
    elif res.min_separation <= schedule.collision_floor:
        out.status = "collision floor"
    elif not out.in_omega():
        # the sign pattern of the search region is lost: rotating-square basin
        out.status = "rotating-square basin"
    else:
        out.converged = True
        out.status = "converged"
    return out


@dataclass(frozen=True)
class RunConfig:
    seeds: tuple = tuple(range(8))
    k: int = 32
    m: int = DEFAULT_QUADRATURE
    amplitude: float = 2.0
    schedule: Schedule = Schedule()
    basin_tol: float = 1e-6
    workers: int | None = None

    def __post_init__(self):
        if self.k < 1 or self.m <= 2 * self.k:
            raise ValueError("need k >= 1 and m > 2k")
        if self.m % 8:
            raise ValueError("m must be a multiple of 8 so the grid is symmetric")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.amplitude <= 0 or self.basin_tol <= 0:
            raise ValueError("amplitude and basin_tol must be positive")


@dataclass
class MinimizeReport:
    best: OrbitResult | None
    results: list
    basins: list  # [(action, [seeds])], largest first

    @property
    def converged(self):
        return self.best is not None


class MinimizationFailed(RuntimeError):
    def __init__(self, report):
        lines = [f"seed {r.seed}: {r.status}" for r in report.results]
        super().__init__("no start converged:\n  " + "\n  ".join(lines))
        self.report = report


def run_start(seed, cfg: RunConfig) -> OrbitResult:
    x0 = random_init(seed, cfg.k, cfg.amplitude)
    try:
        return continuation(x0, cfg.schedule, cfg.m, seed=seed)
    except RestartSignal as exc:
        return OrbitResult(
            loop=x0, action=ActionValue(np.nan, np.nan, np.nan, np.nan), eps_history=[],
            min_separation=0.0, grad_norm=np.nan, omega_signs=np.full(4, np.nan),
            converged=False, seed=seed, status=f"restart: {exc} (rung {exc.rung})",
            log_rows=exc.rows,
        )


def _workers(cfg):
    if cfg.workers is not None:
        return max(1, cfg.workers)
    env = os.environ.get("CHOREO_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(len(cfg.seeds), os.cpu_count() or 1))


def group_basins(results, tol):
    """Cluster converged results whose actions agree within ``tol``."""
    basins = []
    for r in sorted((r for r in results if r.converged), key=lambda r: r.action.total):
        if basins and abs(r.action.total - basins[-1][0]) <= tol:
            basins[-1][1].append(r.seed)
        else:
            basins.append((r.action.total, [r.seed]))
    basins.sort(key=lambda b: (-len(b[1]), b[0]))
    return basins


def minimize(cfg: RunConfig = RunConfig()) -> MinimizeReport:
    """Multi-start driver: one continuation per seed, merged in seed order.

    Returns the lowest-action converged result together with the basin
    census.  Raises :class:`MinimizationFailed` if no start converges.
    """
    n = _workers(cfg)
    if n == 1:
        results = [run_start(s, cfg) for s in cfg.seeds]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(run_start, cfg.seeds, [cfg] * len(cfg.seeds)))
    ok = [r for r in results if r.converged]
    basins = group_basins(results, cfg.basin_tol)
    best = min(ok, key=lambda r: (r.action.total, r.seed)) if ok else None
    report = MinimizeReport(best, results, basins)
    if best is None:
        raise MinimizationFailed(report)
    return report
