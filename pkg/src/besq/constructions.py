"""Solutions assembled from independent smaller systems.

Three recipes, each taking a start point where the plain particle system
does not single out one solution:

* gluing: a non-positive block (the negation of a non-negative system) below
  a non-negative block. Across the split every pairwise ratio is exactly -1,
  so each block only sees a shifted dimension;
* zero block: positive and negative blocks around particles pinned at zero,
  chosen so the drift at zero cancels. This is a second, colliding solution;
* pinned: the lowest ``p - alpha`` particles stay at zero and the rest form an
  ``alpha``-particle system of dimension ``p``, giving a non-negative solution.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .domain import (
    SystemParams,
    classify_strong_uniqueness,
    eligible_integer,
    n_star,
    particle_config,
    ranks,
)
from .rng import RngSpec
from .sde import Event, PathRecord, SimulationGrid, _collision_events, _particle_drift, simulate_particles


def mixed_sign_ratio(x: float, y: float) -> float:
    """``(|x| + |y|) / (x - y)``; exactly -1 whenever ``x <= 0 <= y``, not both 0."""
    return (abs(x) + abs(y)) / (x - y)


def _integer_alpha(params: SystemParams) -> int:
    a = eligible_integer(params.alpha, params.p)
    if a is None:
        raise ValueError(f"alpha must be an integer in {{0, ..., {params.p - 2}}}, got {params.alpha}")
    return a


@dataclass(frozen=True)
class GluePlan:
    """Split of ``p`` particles into a non-positive and a non-negative block.

    ``split`` is the size of the lower block (``p_minus``); ``z0`` is the start
    of the negated lower block and ``y0`` the start of the upper block.
    """

    p: int
    alpha: int
    n_star: int
    p_minus: int
    alpha_minus: int
    p_plus: int
    alpha_plus: int
    split: int
    z0: tuple[float, ...]
    y0: tuple[float, ...]

    def to_dict(self) -> dict:
        return asdict(self)


def plan_glue(params: SystemParams, x0) -> GluePlan:
    """Plan the gluing construction for ``alpha`` in ``{0, ..., p-2}``.

    Needs ``rk+(x0) <= n*`` and ``rk-(x0) <= p - n*`` so that the lowest
    ``p - n*`` entries are non-positive and the rest non-negative.

    >>> plan = plan_glue(SystemParams(3, 1), [0, 0, 1])
    >>> plan.p_minus, plan.alpha_minus, plan.p_plus, plan.alpha_plus, plan.y0
    (1, 1, 2, 2, (0.0, 1.0))
    """
    x = particle_config(x0, params.p)
    a = _integer_alpha(params)
    p = params.p
    ns = n_star(p, a)
    rk_plus, rk_minus, _ = ranks(x)
    if rk_plus > ns or rk_minus > p - ns:
        raise ValueError(
            f"gluing needs rk+ <= n* = {ns} and rk- <= p - n* = {p - ns}; "
            f"got rk+ = {rk_plus}, rk- = {rk_minus}"
        )
    split = p - ns
    z0 = -x[:split][::-1]
    y0 = x[split:]
    if np.any(z0 < 0) or np.any(y0 < 0):
        raise AssertionError("sub-start points must be non-negative")
    return GluePlan(
        p=p, alpha=a, n_star=ns,
        p_minus=split, alpha_minus=ns - a,
        p_plus=ns, alpha_plus=a + p - ns,
        split=split,
        z0=tuple(float(v) + 0.0 for v in z0),
        y0=tuple(float(v) for v in y0),
    )


def _remap_events(events, index_map, negated: bool) -> list[Event]:
    out = []
    for ev in events:
        if ev.kind == "collision":
            continue
        kind = ev.kind
        if negated and kind == "went_negative":
            kind = "went_positive"
        idx = tuple(index_map[i] for i in ev.index)
        out.append(Event(kind, ev.time, ev.value, idx))
    return out


def _negated_block(path: PathRecord, offset: int) -> tuple[np.ndarray, list[Event]]:
    k = path.p
    # sub-particle i sits at position offset + k - i + 1 after negation
    index_map = {i: offset + k - i + 1 for i in range(1, k + 1)}
    return -path.states[:, ::-1] + 0.0, _remap_events(path.events, index_map, negated=True)


def _upper_block(path: PathRecord, offset: int) -> tuple[np.ndarray, list[Event]]:
    index_map = {i: offset + i for i in range(1, path.p + 1)}
    return path.states, _remap_events(path.events, index_map, negated=False)


def _check_mixed_sign(states, lower: slice, upper: slice) -> int:
    """Verify the -1 ratio for every lower/upper pair; return pairs checked."""
    lo = states[:, lower]
    hi = states[:, upper]
    if lo.size == 0 or hi.size == 0:
        return 0
    if np.any(lo > 0) or np.any(hi < 0):
        raise AssertionError("block signs violated in assembled path")
    a = lo[:, :, None]
    b = hi[:, None, :]
    live = ~((a == 0) & (b == 0))
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = (np.abs(a) + np.abs(b)) / (a - b)
    if not np.all(ratio[live] == -1.0):
        raise AssertionError("mixed-sign pair ratio differs from -1")
    return int(live.sum())


def simulate_glued(plan: GluePlan, grid: SimulationGrid, rng: RngSpec) -> PathRecord:
    """Simulate both blocks independently and assemble ``X = (-Z reversed, Y)``.

    The two blocks draw from ``rng.child(0)`` and ``rng.child(1)``.
    """
    z = simulate_particles(SystemParams(plan.p_minus, plan.alpha_minus), plan.z0, grid, rng.child(0))
    y = simulate_particles(SystemParams(plan.p_plus, plan.alpha_plus), plan.y0, grid, rng.child(1))
    lo, lo_ev = _negated_block(z, 0)
    hi, hi_ev = _upper_block(y, plan.split)
    states = np.hstack([lo, hi])
    checked = _check_mixed_sign(states, slice(0, plan.split), slice(plan.split, plan.p))
    meta = dict(y.meta, p=plan.p, alpha=plan.alpha, construction="glued", plan=plan.to_dict(),
                mixed_sign_pairs_checked=checked)
    path = PathRecord("particles", y.times.copy(), states, meta=meta,
                      minima=np.r_[lo.min(axis=0), y.minima])
    path.events = lo_ev + hi_ev + _collision_events(path.times, states, grid.tol_coll)
    return path


@dataclass(frozen=True)
class ZeroBlockPlan:
    """``l`` negative particles, ``m`` zeros and ``n`` positive particles.

    The zero block's drift is ``alpha + l - n``, which the plan makes zero.
    """

    p: int
    alpha: int
    n: int
    l: int
    m: int
    alpha_plus: int
    alpha_minus: int

    def to_dict(self) -> dict:
        return asdict(self)


def zero_block_plans(params: SystemParams) -> list[ZeroBlockPlan]:
    """All ``(n, l)`` with ``alpha + l - n = 0``, ``n < n*``, ``l < p - n*``.

    Sorted by the preference order: smallest zero block, then largest ``n``.
    """
    a = _integer_alpha(params)
    p = params.p
    ns = n_star(p, a)
    plans = []
    for n in range(ns):
        l = n - a
        if 0 <= l < p - ns:
            plans.append(ZeroBlockPlan(p, a, n, l, p - n - l, a + p - n, p - a - l))
    return sorted(plans, key=lambda pl: (pl.m, -pl.n))


def plan_zero_block(params: SystemParams, x0) -> ZeroBlockPlan:
    """Preferred zero-block plan that can start from ``x0``.

    ``x0`` must fit the block layout: at most ``l`` negative and ``n``
    positive entries, so the middle ``m`` entries are exactly zero.
    """
    x = particle_config(x0, params.p)
    _integer_alpha(params)
    if classify_strong_uniqueness(params, x):
        raise ValueError("the strong solution from x0 is unique; no zero-block solution exists")
    rk_plus, rk_minus, _ = ranks(x)
    plans = zero_block_plans(params)
    fitting = [pl for pl in plans if rk_plus <= pl.n and rk_minus <= pl.l]
    if not fitting:
        raise ValueError(
            f"no zero-block plan fits x0 (rk+ = {rk_plus}, rk- = {rk_minus}); "
            f"candidates (n, l): {[(pl.n, pl.l) for pl in plans]}"
        )
    return fitting[0]


def _zero_drift_check(states, plan: ZeroBlockPlan, alpha: float) -> int:
    """Literal drift of the zero block at each snapshot; must vanish."""
    zero = slice(plan.l, plan.l + plan.m)
    drift = np.empty(plan.p)
    checked = 0
    for row in states:
        if np.any(row[zero] != 0.0):
            raise AssertionError("zero block left zero")
        # only meaningful while the outer blocks are strictly off zero
        if np.any(row[: plan.l] == 0.0) or np.any(row[plan.l + plan.m:] == 0.0):
            continue
        _particle_drift(row, alpha, 0.0, False, drift)
        if not np.all(drift[zero] == 0.0):
            raise AssertionError(f"zero-block drift {drift[zero]} is not zero")
        checked += 1
    return checked


def build_non_unique(params: SystemParams, x0, grid: SimulationGrid, rng: RngSpec) -> PathRecord:
    """A colliding solution from a start point without strong uniqueness.

    Negative block ``-Y`` (``l`` particles, dimension ``p - alpha - l``),
    ``m`` particles held at exactly zero, positive block (``n`` particles,
    dimension ``alpha + p - n``). Blocks draw from ``rng.child(0)`` (negative)
    and ``rng.child(1)`` (positive).
    """
    x = particle_config(x0, params.p)
    plan = plan_zero_block(params, x)
    times = None
    blocks = []
    events = []
    meta = {}
    if plan.l:
        y0 = -x[: plan.l][::-1] + 0.0
        sub = simulate_particles(SystemParams(plan.l, plan.alpha_minus), y0, grid, rng.child(0))
        st, ev = _negated_block(sub, 0)
        blocks.append(st)
        events += ev
        times, meta = sub.times, sub.meta
    if plan.n:
        sub = simulate_particles(SystemParams(plan.n, plan.alpha_plus), x[plan.l + plan.m:], grid, rng.child(1))
        st, ev = _upper_block(sub, plan.l + plan.m)
        events += ev
        times, meta = sub.times, sub.meta
        upper = st
    else:
        upper = None
    if times is None:
        times = np.flatnonzero(grid.record_mask()) * grid.dt
    zeros = np.zeros((times.shape[0], plan.m))
    states = np.hstack(blocks + [zeros] + ([upper] if upper is not None else []))
    checked = _zero_drift_check(states, plan, params.alpha)
    path = PathRecord(
        "particles", times.copy(), states,
        meta=dict(meta, p=params.p, alpha=params.alpha, construction="non-unique",
                  plan=plan.to_dict(), zero_drift_checks=checked),
        minima=states.min(axis=0),
    )
    if upper is not None:
        path.minima[plan.l + plan.m:] = np.minimum(path.minima[plan.l + plan.m:], sub.minima)
    for i in range(plan.l + 1, plan.l + plan.m + 1):
        events.append(Event("hit_zero", 0.0, index=(i,)))
    path.events = events + _collision_events(path.times, states, grid.tol_coll)
    return path


def build_pinned_nonnegative(params: SystemParams, x0, grid: SimulationGrid, rng: RngSpec) -> PathRecord:
    """Non-negative solution with the lowest ``p - alpha`` particles at zero.

    The top ``alpha`` particles run as an ``alpha``-particle system of
    dimension ``p`` (drawing from ``rng.child(0)``).
    """
    x = particle_config(x0, params.p)
    a = _integer_alpha(params)
    p = params.p
    if x[0] < 0:
        raise ValueError("pinned construction needs a non-negative start")
    rk = ranks(x)[2]
    if rk > a:
        raise ValueError(f"pinned construction needs rk(x0) <= alpha = {a}, got rk = {rk}")
    k = p - a
    events = [Event("hit_zero", 0.0, index=(i,)) for i in range(1, k + 1)]
    if a:
        sub = simulate_particles(SystemParams(a, float(p)), x[k:], grid, rng.child(0))
        st, ev = _upper_block(sub, k)
        times, meta = sub.times.copy(), dict(sub.meta)
        events += ev
        states = np.hstack([np.zeros((times.shape[0], k)), st])
    else:
        times = np.flatnonzero(grid.record_mask()) * grid.dt
        meta = {"t_end": grid.t_end, "dt": grid.dt, "seed": rng.seed, "stream": list(rng.stream),
                "zero_noise": rng.zero_noise}
        states = np.zeros((times.shape[0], p))
    meta.update(p=p, alpha=params.alpha, construction="pinned", pinned=k)
    path = PathRecord("particles", times, states, meta=meta, minima=states.min(axis=0))
    if a:
        path.minima[k:] = np.minimum(path.minima[k:], sub.minima)
    path.events = events + _collision_events(times, states, grid.tol_coll)
    return path
