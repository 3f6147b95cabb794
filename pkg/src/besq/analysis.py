"""Statistics of simulated paths and exact reference curves.

The moment curve is the only exact quantity here: the drift of ``e_n`` is
linear in ``e_{n-1}``, so ``E e_n(t)`` is a polynomial in ``t`` whenever the
martingale parts have mean zero (assumed for bounded horizons).
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import rng as rng_ids
from .constructions import build_non_unique, build_pinned_nonnegative, plan_glue, simulate_glued
from .domain import SystemParams, particle_config
from .rng import RngSpec
from .sde import PathAborted, PathRecord, SimulationGrid, simulate_particles, simulate_polys, simulate_wishart
from .sympoly import _bracket_matrix, elementary_all, roots_with_residual

log = logging.getLogger(__name__)

MODELS = ("particles", "wishart", "polys", "glued", "non-unique", "pinned")
_COMPONENT = {
    "particles": rng_ids.PARTICLES,
    "wishart": rng_ids.WISHART,
    "polys": rng_ids.POLYS,
    "glued": rng_ids.GLUED,
    "non-unique": rng_ids.NON_UNIQUE,
    "pinned": rng_ids.PINNED,
}


@dataclass
class McSummary:
    """Sample mean with standard error over the completed replicates."""

    estimate: float
    std_error: float
    n_reps: int
    ci95: tuple[float, float]
    completion_rate: float = 1.0
    n_completed: int | None = None

    @classmethod
    def from_values(cls, values, n_reps: int | None = None) -> "McSummary":
        v = np.asarray(values, dtype=float)
        n_reps = v.size if n_reps is None else n_reps
        done = v[np.isfinite(v)]
        k = done.size
        est = float(done.mean()) if k else math.nan
        se = float(done.std(ddof=1) / math.sqrt(k)) if k >= 2 else math.nan
        return cls(est, se, n_reps, (est - 1.96 * se, est + 1.96 * se),
                   k / n_reps if n_reps else math.nan, k)

    def contains(self, value: float) -> bool:
        return self.ci95[0] <= value <= self.ci95[1]

    def z_score(self, value: float) -> float:
        """Signed distance to ``value`` in standard errors."""
        if self.std_error == 0:
            return 0.0 if self.estimate == value else math.copysign(math.inf, self.estimate - value)
        return (self.estimate - value) / self.std_error

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ci95"] = list(self.ci95)
        return d


def combined_z(a: McSummary, b: McSummary) -> float:
    """Difference of two independent estimates over their combined error."""
    se = math.hypot(a.std_error, b.std_error)
    if se == 0:
        return 0.0 if a.estimate == b.estimate else math.inf
    return (a.estimate - b.estimate) / se


# -- hitting times -----------------------------------------------------------


@dataclass
class HittingTimes:
    """First grid times at or below zero and strictly below zero.

    Non-hits are ``inf`` with the matching ``censored_*`` flag set: a finite
    horizon cannot certify that a time is infinite. Grid times overstate the
    true hitting times by at most one recorded step.
    """

    T0: np.ndarray
    Tminus: np.ndarray
    censored_zero: np.ndarray
    censored_negative: np.ndarray
    horizon: float
    order_violations: list[int] = field(default_factory=list)

    def __iter__(self):
        yield self.T0
        yield self.Tminus


def _first_times(times, below):
    hit = below.any(axis=0)
    first = np.argmax(below, axis=0)
    return np.where(hit, times[first], np.inf), ~hit


def detect_hitting_times(path: PathRecord, tol_zero: float) -> HittingTimes:
    """Scan the recorded particle snapshots for zero hits and negative entries.

    ``T0`` should be non-decreasing in the particle index; indices where it
    is not are reported in ``order_violations`` (a discretization artifact).

    >>> import numpy as np
    >>> path = PathRecord("particles", np.arange(4.0), np.array([[1.0], [0.5], [5e-4], [-0.1]]))
    >>> h = detect_hitting_times(path, 1e-3)
    >>> h.T0, h.Tminus
    (array([2.]), array([3.]))
    """
    x = path.particle_states()
    times = np.asarray(path.times, dtype=float)
    T0, c0 = _first_times(times, x <= tol_zero)
    Tm, cm = _first_times(times, x < -tol_zero)
    bad = [i + 1 for i in range(T0.size - 1) if T0[i] > T0[i + 1]]
    if bad:
        log.warning("zero-hitting times out of particle order at indices %s", bad)
    return HittingTimes(T0, Tm, c0, cm, float(times[-1]), bad)


def increments_after_entry(path: PathRecord, i: int, s: float, tol_zero: float) -> np.ndarray:
    """``X(T + s) - X(T)`` for ``T`` the first recorded time particle ``i`` is below ``-tol_zero``.

    All NaN when ``T`` is censored or ``T + s`` is past the horizon. Past
    ``T`` the ``k`` negative particles and the rest form two blocks whose
    cross terms are exactly -1, so each block's mean drift is constant.
    """
    x = path.particle_states()
    times = np.asarray(path.times, dtype=float)
    Tm = detect_hitting_times(path, tol_zero).Tminus[i - 1]
    out = np.full(x.shape[1], np.nan)
    if not math.isfinite(Tm):
        return out
    a = int(np.searchsorted(times, Tm))
    b = int(np.searchsorted(times, Tm + s - 1e-9 * max(1.0, s)))
    if b >= times.size or not math.isclose(times[b], times[a] + s, rel_tol=1e-9, abs_tol=1e-12):
        return out
    return x[b] - x[a]


# -- moment curve ------------------------------------------------------------


def _poly_vector(e0, p: int) -> np.ndarray:
    e = np.asarray(e0, dtype=float).ravel()
    if e.shape[0] == p:
        e = np.r_[1.0, e]
    if e.shape[0] != p + 1 or e[0] != 1.0:
        raise ValueError(f"e0 must be (e_1, ..., e_p) or (1, e_1, ..., e_p) with p={p}")
    return e


def moment_coefficients(params: SystemParams, e0) -> np.ndarray:
    """``C`` with ``E e_n(t) = sum_k C[n, k] t^k`` (rows ``n = 0..p``).

    Integrates ``d/dt E e_n = (p - n + 1)(alpha - (n - 1)) E e_{n-1}``.
    """
    p, alpha = params.p, params.alpha
    if alpha < p - 1:
        raise ValueError(f"moment curve needs alpha >= p - 1 = {p - 1}, got {alpha}")
    e = _poly_vector(e0, p)
    roots, residual = roots_with_residual(e, p)
    if residual > 1e-8 or roots[0] < -1e-9 * max(1.0, abs(roots[-1])):
        raise ValueError("e0 must come from non-negative real particles")
    C = np.zeros((p + 1, p + 1))
    C[:, 0] = e
    for n in range(1, p + 1):
        c = (p - n + 1) * (alpha - (n - 1))
        for k in range(1, n + 1):
            C[n, k] = c * C[n - 1, k - 1] / k
    return C


def moment_curve(params: SystemParams, e0, t: float) -> np.ndarray:
    """``(1, E e_1(t), ..., E e_p(t))``.

    >>> moment_curve(SystemParams(2, 3.0), [1, 3, 2], 0.5)
    array([1. , 6. , 6.5])
    """
    C = moment_coefficients(params, e0)
    powers = float(t) ** np.arange(C.shape[1])
    return C @ powers


# -- Monte Carlo -------------------------------------------------------------

Statistic = Callable[[PathRecord], float]


def simulate_model(model: str, params: SystemParams, x0, grid: SimulationGrid, rng: RngSpec) -> PathRecord:
    """Dispatch one path of ``model``; ``x0`` is a particle vector except that
    ``wishart`` also accepts a full matrix."""
    if model == "particles":
        return simulate_particles(params, x0, grid, rng)
    if model == "wishart":
        Y0 = np.asarray(x0, dtype=float)
        if Y0.ndim == 1:
            Y0 = np.diag(particle_config(Y0, params.p))
        return simulate_wishart(params, Y0, grid, rng)
    if model == "polys":
        return simulate_polys(params, elementary_all(particle_config(x0, params.p)), grid, rng)
    if model == "glued":
        return simulate_glued(plan_glue(params, x0), grid, rng)
    if model == "non-unique":
        return build_non_unique(params, x0, grid, rng)
    if model == "pinned":
        return build_pinned_nonnegative(params, x0, grid, rng)
    raise ValueError(f"unknown model {model!r}; expected one of {', '.join(MODELS)}")


def mc_values(
    statistics: dict[str, Statistic],
    params: SystemParams,
    x0,
    grid: SimulationGrid,
    n_reps: int,
    rng_base: RngSpec,
    model: str = "particles",
    threads: int = 1,
) -> dict[str, np.ndarray]:
    """Per-replicate statistic values; aborted paths and NaN values are NaN.

    Replicate ``r`` uses stream ``(r, component of model)``; values are
    stored by replicate id, so the result does not depend on ``threads``.
    """
    if n_reps < 1:
        raise ValueError("n_reps must be >= 1")
    component = _COMPONENT.get(model)
    if component is None:
        raise ValueError(f"unknown model {model!r}")
    out = {name: np.full(n_reps, np.nan) for name in statistics}
    aborted = np.zeros(n_reps, dtype=bool)

    def one(r):
        try:
            path = simulate_model(model, params, x0, grid, rng_base.replicate(r, component))
        except PathAborted as exc:
            log.info("replicate %d aborted: %s", r, exc)
            aborted[r] = True
            return
        for name, stat in statistics.items():
            out[name][r] = float(stat(path))

    if threads <= 1:
        for r in range(n_reps):
            one(r)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(one, range(n_reps)))
    if aborted.any():
        log.warning("%d of %d replicates aborted", int(aborted.sum()), n_reps)
    return out


def mc_estimate_many(statistics: dict[str, Statistic], params, x0, grid, n_reps, rng_base,
                     model="particles", threads=1) -> dict[str, McSummary]:
    """Several statistics evaluated on the same replicate paths."""
    if n_reps < 2:
        raise ValueError("n_reps must be >= 2")
    vals = mc_values(statistics, params, x0, grid, n_reps, rng_base, model, threads)
    return {name: McSummary.from_values(v, n_reps) for name, v in vals.items()}


def mc_estimate(statistic: Statistic, params: SystemParams, x0, grid: SimulationGrid, n_reps: int,
                rng_base: RngSpec, model: str = "particles", threads: int = 1) -> McSummary:
    """Mean of ``statistic`` over ``n_reps`` independent paths."""
    return mc_estimate_many({"s": statistic}, params, x0, grid, n_reps, rng_base, model, threads)["s"]


# -- statistics ----------------------------------------------------------------


def _time_index(path: PathRecord, t: float) -> int:
    i = int(np.searchsorted(path.times, t - 1e-9 * max(1.0, abs(t))))
    if i >= path.times.size or not math.isclose(path.times[i], t, rel_tol=1e-9, abs_tol=1e-12):
        return -1
    return i


def e_at(n: int, t: float) -> Statistic:
    """``e_n`` at recorded time ``t``; NaN if the path stopped before ``t``."""

    def stat(path):
        i = _time_index(path, t)
        return math.nan if i < 0 else float(path.poly_states()[i, n - 1]) if n else 1.0

    return stat


def x_at(i: int, t: float) -> Statistic:
    """Particle ``i`` (1-based) at recorded time ``t``."""

    def stat(path):
        k = _time_index(path, t)
        return math.nan if k < 0 else float(path.particle_states()[k, i - 1])

    return stat


def hit_indicator(i: int) -> Statistic:
    """1.0 if particle ``i`` logged a ``hit_zero`` event."""
    return lambda path: float(bool(path.find_events("hit_zero", (i,))))


def below_indicator(i: int, level: float) -> Statistic:
    """1.0 if particle ``i`` was ever strictly below ``-level``."""

    def stat(path):
        low = path.minima[i - 1] if path.minima is not None else path.particle_states()[:, i - 1].min()
        return float(low < -level)

    return stat


def min_gap_over(t_lo: float, t_hi: float) -> Statistic:
    """Smallest adjacent-particle gap over recorded times in ``[t_lo, t_hi]``."""

    def stat(path):
        sel = (path.times >= t_lo) & (path.times <= t_hi)
        x = path.particle_states()[sel]
        return float(np.diff(x, axis=1).min()) if x.shape[1] > 1 else math.inf

    return stat


def constant(c: float) -> Statistic:
    return lambda path: float(c)


# -- covariation and drift ---------------------------------------------------


def realized_covariation(path: PathRecord, n: int, m: int) -> float:
    """``sum_k (e_n(t_{k+1}) - e_n(t_k)) (e_m(t_{k+1}) - e_m(t_k))``."""
    e = path.poly_states()
    return float(np.sum(np.diff(e[:, n - 1]) * np.diff(e[:, m - 1])))


def integrated_bracket(path: PathRecord, n: int, m: int) -> float:
    """Left-point Riemann sum of the closed-form bracket rate along the path."""
    e = path.poly_states()
    p = e.shape[1]
    dt = np.diff(path.times)
    total = 0.0
    for k in range(dt.size):
        S = _bracket_matrix(np.r_[1.0, e[k]], p)
        total += S[n - 1, m - 1] * dt[k]
    return float(total)


def drift_regression_ep(paths, params: SystemParams) -> McSummary:
    """Least-squares ``c`` in ``de_p = c e_{p-1} dt + noise`` across all steps.

    The standard error is heteroskedasticity-robust (sandwich form), valid
    because the residuals are martingale increments. For the particle system
    ``c`` should equal ``alpha - p + 1``.
    """
    p, alpha = params.p, params.alpha
    if alpha < p - 1:
        raise ValueError(f"drift regression needs alpha >= p - 1 = {p - 1}, got {alpha}")
    xs, ys = [], []
    for path in paths:
        e = path.poly_states()
        lower = e[:-1, p - 2] if p >= 2 else np.ones(e.shape[0] - 1)
        xs.append(lower * np.diff(path.times))
        ys.append(np.diff(e[:, p - 1]))
    if not xs:
        raise ValueError("no paths supplied")
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    sxx = float(x @ x)
    scale = float(np.abs(x).max()) if x.size else 0.0
    if sxx == 0.0 or scale == 0.0 or sxx <= 1e-24 * x.size * scale**2:
        raise ValueError("degenerate regressor: e_{p-1} vanishes along the paths")
    c = float(x @ y) / sxx
    r = y - c * x
    se = math.sqrt(float(np.sum(x * x * r * r))) / sxx
    return McSummary(c, se, len(xs), (c - 1.96 * se, c + 1.96 * se), 1.0, len(xs))
