import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from besq.constructions import (
    build_non_unique,
    build_pinned_nonnegative,
    mixed_sign_ratio,
    plan_glue,
    plan_zero_block,
    simulate_glued,
    zero_block_plans,
)
from besq.domain import SystemParams, classify_strong_uniqueness, n_star
from besq.rng import RngSpec
from besq.sde import SimulationGrid, step_particles

ZERO = RngSpec(0, zero_noise=True)
GRID = SimulationGrid(1.0, 0.1)


@given(st.floats(-1e6, 0), st.floats(0, 1e6))
def test_mixed_sign_ratio_is_exactly_minus_one(x, y):
    assume(not (x == 0 and y == 0))
    assert mixed_sign_ratio(x, y) == -1.0


def test_mixed_sign_ratio_same_sign_differs():
    assert mixed_sign_ratio(1.0, 3.0) == -2.0


# -- gluing -------------------------------------------------------------------------


@pytest.mark.parametrize("p,alpha,x0,expect", [
    (2, 0, [0, 0], (1, 1, 1, 1)),
    (3, 1, [0, 0, 1], (1, 1, 2, 2)),
    (4, 0, [-1, 0, 0, 2], (2, 2, 2, 2)),
    (5, 1, [-2, 0, 1, 2, 3], (2, 2, 3, 3)),
])
def test_glue_plan_examples(p, alpha, x0, expect):
    plan = plan_glue(SystemParams(p, alpha), x0)
    assert (plan.p_minus, plan.alpha_minus, plan.p_plus, plan.alpha_plus) == expect
    x = np.asarray(x0, dtype=float)
    assert np.array_equal(np.r_[-np.asarray(plan.z0)[::-1], plan.y0], x)


def test_glue_plan_invariants_exhaustive():
    for p in range(2, 13):
        for a in range(p - 1):
            ns = n_star(p, a)
            plan = plan_glue(SystemParams(p, a), np.zeros(p))
            assert plan.p_minus + plan.p_plus == p
            # blocks are in their own non-colliding regime
            assert plan.alpha_plus >= plan.p_plus - 1
            assert plan.alpha_minus >= plan.p_minus - 1
            # cross-block pairs contribute exactly +-1 per partner
            assert plan.alpha_plus == a + plan.p_minus
            assert plan.alpha_minus == plan.p_plus - a
            assert plan.n_star == ns


@pytest.mark.parametrize("p,alpha,x0", [(3, 1, [1, 2, 3]), (3, 0.5, [0, 0, 0]), (3, 2, [0, 0, 0]), (4, 0, [-3, -2, -1, 1])])
def test_glue_plan_rejects(p, alpha, x0):
    with pytest.raises(ValueError):
        plan_glue(SystemParams(p, alpha), x0)


def test_glued_zero_noise_two_particles():
    path = simulate_glued(plan_glue(SystemParams(2, 0), [0, 0]), GRID, ZERO)
    t = path.times
    assert np.allclose(path.states, np.c_[-t, t], rtol=1e-14)
    # the assembled path is itself an Euler path of the full system
    for k in range(1, len(t)):
        nxt = step_particles(path.states[k - 1], SystemParams(2, 0), 0.1, [0.0, 0.0])
        assert np.allclose(nxt, path.states[k], rtol=1e-13)


def test_glued_noisy_path_block_signs():
    plan = plan_glue(SystemParams(5, 1), [-1, 0, 0, 0.5, 1])
    path = simulate_glued(plan, SimulationGrid(1.0, 1e-3, record_every=10), RngSpec(11))
    lo, hi = path.states[:, : plan.split], path.states[:, plan.split:]
    assert np.all(lo <= 0) and np.all(hi >= 0)
    assert np.all(np.diff(path.states, axis=1) >= 0)
    assert path.meta["mixed_sign_pairs_checked"] > 0
    assert not path.find_events("went_negative", (4,))


# -- zero block ---------------------------------------------------------------------


def test_zero_block_plan_order_and_drift():
    plans = zero_block_plans(SystemParams(4, 0))
    assert [(pl.n, pl.l, pl.m) for pl in plans] == [(1, 1, 2), (0, 0, 4)]
    for p in range(2, 13):
        for a in range(p - 1):
            for pl in zero_block_plans(SystemParams(p, a)):
                assert a + pl.l - pl.n == 0
                assert pl.n + pl.l + pl.m == p
                assert pl.alpha_plus == a + p - pl.n and pl.alpha_minus == p - a - pl.l


def test_non_unique_zero_noise_three():
    params = SystemParams(3, 1)
    plan = plan_zero_block(params, [0, 0, 1])
    assert (plan.n, plan.l, plan.m) == (1, 0, 2)
    path = build_non_unique(params, [0, 0, 1], GRID, ZERO)
    t = path.times
    assert np.allclose(path.states, np.c_[0 * t, 0 * t, 1 + 3 * t], rtol=1e-14)
    assert path.meta["zero_drift_checks"] == len(t)
    assert path.first_time("hit_zero", (1,)) == 0.0


def test_non_unique_zero_noise_four():
    path = build_non_unique(SystemParams(4, 0), [-1, 0, 0, 1], GRID, ZERO)
    t = path.times
    assert np.allclose(path.states, np.c_[-1 - 3 * t, 0 * t, 0 * t, 1 + 3 * t], rtol=1e-14)


def test_non_unique_differs_from_separating_path():
    # the same start admits a path where the zero particles separate at once
    params, x0 = SystemParams(3, 1), [0, 0, 1]
    assert not classify_strong_uniqueness(params, x0)
    grid = SimulationGrid(0.5, 1e-3, record_every=50)
    glued = simulate_glued(plan_glue(params, x0), grid, RngSpec(3))
    held = build_non_unique(params, x0, grid, RngSpec(3))
    assert np.all(held.states[:, :2] == 0.0)
    assert np.any(glued.states[-1, :2] != 0.0)


def test_non_unique_noisy_keeps_zero_block():
    path = build_non_unique(SystemParams(6, 1), [-1, 0, 0, 0, 1, 2], SimulationGrid(0.5, 1e-3, record_every=10),
                            RngSpec(4))
    plan = path.meta["plan"]
    zero = path.states[:, plan["l"]: plan["l"] + plan["m"]]
    assert np.all(zero == 0.0)
    assert path.meta["zero_drift_checks"] > 0


@pytest.mark.parametrize("p,alpha,x0", [(3, 1, [1, 2, 3]), (3, 1, [-1, -0.5, 1]), (4, 0.5, [0, 0, 0, 0])])
def test_non_unique_rejects(p, alpha, x0):
    with pytest.raises(ValueError):
        plan_zero_block(SystemParams(p, alpha), x0)


# -- pinned --------------------------------------------------------------------------


def test_pinned_zero_noise():
    path = build_pinned_nonnegative(SystemParams(3, 1), [0, 0, 2], GRID, ZERO)
    t = path.times
    assert np.allclose(path.states, np.c_[0 * t, 0 * t, 2 + 3 * t], rtol=1e-14)
    empty = build_pinned_nonnegative(SystemParams(2, 0), [0, 0], GRID, ZERO)
    assert np.array_equal(empty.states, np.zeros((11, 2)))


def test_pinned_noisy_stays_nonnegative():
    path = build_pinned_nonnegative(SystemParams(5, 2), [0, 0, 0, 0.5, 1], SimulationGrid(1.0, 1e-3), RngSpec(9))
    assert np.all(path.states[:, :3] == 0)
    assert np.all(path.states >= 0)
    assert not path.find_events("went_negative")


@pytest.mark.parametrize("p,alpha,x0", [(3, 1, [0, 1, 2]), (3, 1, [-1, 0, 1]), (3, 2, [0, 0, 1])])
def test_pinned_rejects(p, alpha, x0):
    with pytest.raises(ValueError):
        build_pinned_nonnegative(SystemParams(p, alpha), x0, GRID, ZERO)
