"""Variational search for the super-eight choreography of the planar equal-mass four-body problem.

The problem is reduced to the pair ``(q1, q2)`` with ``q3 = -q1`` and ``q4 = -q2``.
"""
from .action import ActionValue, action_loop, action_segment, gradient, value_and_gradient
from .bounds import BoundReport, kepler_min_action, shape_potential_min, total_collision_lower_bound
from .dynamics import CollisionError, Configuration, PhasePoint, potential_U
from .minimizer import OrbitResult, RunConfig, Schedule, continuation, descend, minimize
from .pathspace import FourierLoop, random_init
from .symmetry import build_group, equivariant_project
from .verify import ResidualReport, integrate_newton, residual_report, rotating_square_loop

__version__ = "0.1.0"

__all__ = [
    "ActionValue", "BoundReport", "CollisionError", "Configuration", "FourierLoop", "OrbitResult",
    "PhasePoint", "ResidualReport", "RunConfig", "Schedule", "action_loop", "action_segment",
    "build_group", "continuation", "descend", "equivariant_project", "gradient", "integrate_newton",
    "kepler_min_action", "minimize", "potential_U", "random_init", "residual_report",
    "rotating_square_loop", "shape_potential_min", "total_collision_lower_bound", "value_and_gradient",
]
