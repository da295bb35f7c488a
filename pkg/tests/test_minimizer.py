import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supereight.action import action_loop
from supereight.bounds import TEST_PATH
from supereight.minimizer import (
    MinimizationFailed,
    OrbitResult,
    RunConfig,
    Schedule,
    continuation,
    default_ladder,
    descend,
    group_basins,
    max_safe_step,
    minimize,
)
from supereight.pathspace import random_init
from supereight.symmetry import is_fixed, segment_to_loop

SHORT = Schedule(eps_ladder=(0.1, 0.01, 0.0), grad_tol=1e-6)


def lifted_test_path(k=16):
    t = np.linspace(0, math.pi / 4, 257)
    q = TEST_PATH.positions(t)
    return segment_to_loop(t, q[:, 0:2], q[:, 2:4], k=k)


def test_default_ladder():
    lad = default_ladder()
    assert lad[0] == 0.1 and lad[-1] == 0.0 and len(lad) == 18
    assert lad[16] == pytest.approx(0.1 / 2**16)


@pytest.mark.parametrize("kw", [
    dict(eps_ladder=(0.1, 0.01)),
    dict(eps_ladder=(0.01, 0.1, 0.0)),
    dict(step=0.0),
    dict(step=3.0, max_step=2.0),
    dict(growth=0.5),
    dict(grad_tol=0.0),
])
def test_schedule_validation(kw):
    with pytest.raises(ValueError):
        Schedule(**kw)


@pytest.mark.parametrize("kw", [dict(k=0), dict(m=60), dict(k=8, m=12), dict(seeds=()), dict(amplitude=-1.0)])
def test_run_config_validation(kw):
    with pytest.raises(ValueError):
        RunConfig(**kw)


def test_descend_from_lifted_test_path():
    rows = []
    r = descend(lifted_test_path(), 1e-3, Schedule(grad_tol=1e-7, rung_tol=None), 512,
                record=lambda *a: rows.append(a))
    assert r.converged and r.grad_norm < 1e-7
    assert is_fixed(r.loop)
    vals = [row[1] for row in rows]
    assert np.all(np.diff(vals) <= 0)
    # below the test path
    assert r.value / 8 < action_loop(lifted_test_path(), 1e-3, 512).total / 8


def test_descend_at_a_critical_point_takes_no_steps():
    r = descend(lifted_test_path(), 1e-3, Schedule(grad_tol=1e-7, rung_tol=None), 512)
    again = descend(r.loop, 1e-3, Schedule(grad_tol=1e-6, rung_tol=None), 512)
    assert again.iterations == 0 and again.converged


@given(st.integers(0, 1000))
@settings(max_examples=8)
def test_continuation_values_non_increasing(seed):
    res = continuation(random_init(seed, 6), SHORT, 128, seed=seed)
    vals = [v for _, v in res.eps_history]
    assert [e for e, _ in res.eps_history] == list(SHORT.eps_ladder)
    assert np.all(np.diff(vals) <= 0)


@given(st.integers(0, 1000), st.integers(0, 1000))
@settings(max_examples=20)
def test_safe_step_keeps_pair_vectors_away_from_zero(s1, s2):
    x = random_init(s1, 6)
    d = random_init(s2, 6)
    h = max_safe_step(x, d, 256)
    from supereight.minimizer import _pair_vectors

    a = np.linalg.norm(_pair_vectors(x, 256), axis=-1)
    b = np.linalg.norm(_pair_vectors(x - h * d, 256), axis=-1)
    assert np.all(b >= 0.5 * a - 1e-12)


def test_minimize_small_and_deterministic():
    cfg = RunConfig(seeds=(0, 1, 2), k=8, m=256, workers=1)
    a = minimize(cfg)
    b = minimize(cfg)
    assert a.converged
    assert len(a.basins[0][1]) == 3
    assert a.best.in_omega()
    assert np.array_equal(a.best.loop.vector(), b.best.loop.vector())
    assert a.best.action.total == pytest.approx(3.6198518648786, abs=1e-9)


def test_minimize_parallel_matches_serial():
    a = minimize(RunConfig(seeds=(0, 1), k=6, m=128, workers=1))
    b = minimize(RunConfig(seeds=(0, 1), k=6, m=128, workers=2))
    assert np.array_equal(a.best.loop.vector(), b.best.loop.vector())


def test_minimization_failure_is_reported():
    cfg = RunConfig(seeds=(0,), k=6, m=128, workers=1, schedule=Schedule(max_iters=1))
    with pytest.raises(MinimizationFailed) as e:
        minimize(cfg)
    assert "seed 0" in str(e.value)
    assert not e.value.report.results[0].converged


def test_collision_floor_restart_is_reported():
    cfg = RunConfig(seeds=(0,), k=6, m=128, workers=1, schedule=Schedule(collision_floor=10.0))
    with pytest.raises(MinimizationFailed) as e:
        minimize(cfg)
    r = e.value.report.results[0]
    assert r.status.startswith("restart") and r.log_rows


def _fake(seed, total):
    from supereight.action import ActionValue

    return OrbitResult(None, ActionValue(total, 0, 0, 0), [], 1.0, 0.0, np.array([1, 1, 1, -1]), True, seed)


def test_group_basins():
    rs = [_fake(0, 1.0), _fake(1, 1.0 + 1e-8), _fake(2, 2.0), _fake(3, 1.0 - 1e-8)]
    b = group_basins(rs, 1e-6)
    assert b[0][1] == [3, 0, 1] and b[1][1] == [2]
