"""Euler-Maruyama integration of the three representations.

* particles: the ordered system ``dX_i = 2 sqrt|X_i| dB_i + (alpha + sum_j
  (|X_i| + |X_j|) / (X_i - X_j) 1{X_i != X_j}) dt``;
* wishart: ``dY = sqrt|Y| dW + dW^T sqrt|Y| + alpha I dt`` on symmetric
  matrices, recorded through its ordered eigenvalues;
* polys: the elementary symmetric polynomials ``(e_1, ..., e_p)`` driven by
  their closed-form drift and bracket matrix.

All three share :class:`SimulationGrid`, :class:`PathRecord` and seeded
noise from :mod:`besq.rng`. The inner loops are numba kernels that consume
one noise buffer sequentially; when a buffer runs low the kernel returns,
the driver appends more variates from the same stream and resumes, so a
path depends only on its :class:`~besq.rng.RngSpec`.

Particle stepping departs from textbook Euler in two places, both aimed at
approximating the non-colliding solution:

* a step that would carry a particle strictly across zero lands on zero
  instead; a particle at zero has no noise and moves by its drift alone;
* particles tied exactly at zero get their pairwise drift from a symmetric
  infinitesimal split of the tie, since noise cannot separate them there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .domain import SystemParams, particle_config
from .linalg import TOL_PSD, _jacobi_eigh, as_symmetric
from .rng import RngSpec, gaussian_stream
from .sympoly import _bracket_matrix, _elementary, _real_roots, _root_residual, roots_with_residual

# kernel exit codes
_DONE = 0
_NEED_NOISE = 1
_NONFINITE = 2
_INDEFINITE = 3
_EXITED = 4

# residual above which a drifted polynomial state is projected back
PROJECTION_TOL = 1e-12
# a particle within ZERO_STEP_FACTOR * h of zero triggers substeps; at or
# above that distance a step of size h reaches zero only through a Gaussian
# increment below -sqrt(ZERO_STEP_FACTOR) / 2 = -4
ZERO_STEP_FACTOR = 64.0


class PathAborted(RuntimeError):
    """A path hit a numerical failure; ``path`` holds what was simulated."""

    def __init__(self, message: str, path: "PathRecord | None" = None):
        super().__init__(message)
        self.path = path


@dataclass(frozen=True)
class SimulationGrid:
    """Time horizon, base step and event tolerances.

    ``substep_cap`` bounds the number of substeps the particle integrator may
    split one base step into (rounded down to a power of two).
    ``record_every`` thins the stored snapshots; events are still detected at
    every step.
    """

    t_end: float
    dt: float
    substep_cap: int = 64
    tol_coll: float = 1e-12
    tol_zero: float = 1e-9
    record_every: int = 1

    def __post_init__(self):
        if not self.dt > 0 or not self.t_end > 0:
            raise ValueError("dt and t_end must be positive")
        if int(self.substep_cap) != self.substep_cap or self.substep_cap < 1:
            raise ValueError("substep_cap must be an integer >= 1")
        if not self.tol_coll > 0 or not self.tol_zero > 0:
            raise ValueError("tolerances must be positive")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError("record_every must be an integer >= 1")
        ratio = self.t_end / self.dt
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ValueError(f"t_end={self.t_end} is not a multiple of dt={self.dt}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def substep_units(self) -> int:
        """Largest power of two not above ``substep_cap``."""
        return 1 << (int(self.substep_cap).bit_length() - 1)

    def record_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_steps + 1, dtype=np.bool_)
        mask[:: self.record_every] = True
        mask[-1] = True
        return mask


@dataclass
class Event:
    """One logged occurrence; ``index`` holds 1-based particle indices."""

    kind: str
    time: float
    value: float = math.nan
    index: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {"kind": self.kind, "time": self.time, "value": self.value, "index": list(self.index)}


@dataclass
class PathRecord:
    """Snapshots of one simulated path.

    ``states`` rows are ordered particles (``kind='particles'``), ordered
    eigenvalues (``'wishart'``) or ``(e_1, ..., e_p)`` (``'polys'``).
    ``minima`` holds the running minimum of each ordered coordinate over
    every integration step, including the ones not kept as snapshots.
    """

    kind: str
    times: np.ndarray
    states: np.ndarray
    events: list[Event] = field(default_factory=list)
    particles: np.ndarray | None = None
    matrices: np.ndarray | None = None
    meta: dict = field(default_factory=dict)
    minima: np.ndarray | None = None

    @property
    def p(self) -> int:
        return self.states.shape[1]

    @property
    def columns(self) -> list[str]:
        sym = "e" if self.kind == "polys" else "X"
        return ["t"] + [f"{sym}{i}" for i in range(1, self.p + 1)]

    def particle_states(self) -> np.ndarray:
        if self.kind == "polys":
            return self.particles
        return self.states

    def poly_states(self) -> np.ndarray:
        """``(e_1, ..., e_p)`` at every snapshot."""
        if self.kind == "polys":
            return self.states
        return np.array([_elementary(row)[1:] for row in self.states]).reshape(self.states.shape)

    def find_events(self, kind: str, index: tuple[int, ...] | None = None) -> list[Event]:
        return [ev for ev in self.events if ev.kind == kind and (index is None or ev.index == index)]

    def first_time(self, kind: str, index: tuple[int, ...]) -> float:
        """Time of the first ``kind`` event for ``index``, ``inf`` if none."""
        hits = self.find_events(kind, index)
        return min(ev.time for ev in hits) if hits else math.inf

    @property
    def completed(self) -> bool:
        return not self.find_events("exit") and self.times[-1] >= self.meta.get("t_end", self.times[-1])


# -- particle kernels --------------------------------------------------------


@njit(cache=True, nogil=True)
def _particle_drift(x, alpha, tol_coll, split_ties, out):
    p = x.shape[0]
    zstart = -1
    zcount = 0
    for i in range(p):
        if x[i] == 0.0:
            if zstart < 0:
                zstart = i
            zcount += 1
    half = 0.5 * (zcount - 1)
    for i in range(p):
        d = alpha
        for j in range(p):
            if j == i:
                continue
            if x[i] == 0.0 and x[j] == 0.0:
                if split_ties:
                    oi = (i - zstart) - half
                    oj = (j - zstart) - half
                    d += (abs(oi) + abs(oj)) / (oi - oj)
                continue
            diff = x[i] - x[j]
            if abs(diff) <= tol_coll:
                continue
            d += (abs(x[i]) + abs(x[j])) / diff
        out[i] = d


@njit(cache=True, nogil=True)
def _particle_step(x, alpha, h, z, zpos, tol_coll, stop_at_zero, split_ties, drift, out):
    _particle_drift(x, alpha, tol_coll, split_ties, drift)
    sh = math.sqrt(h)
    for i in range(x.shape[0]):
        xi = x[i]
        xn = xi + 2.0 * math.sqrt(abs(xi)) * sh * z[zpos + i] + drift[i] * h
        if stop_at_zero and ((xi > 0.0 and xn < 0.0) or (xi < 0.0 and xn > 0.0)):
            xn = 0.0
        out[i] = xn
    out.sort()


@njit(cache=True, nogil=True)
def _min_gap(x, tol_coll):
    # sorted input: the smallest gap is between neighbours; ties are skipped
    g = np.inf
    for i in range(x.shape[0] - 1):
        d = x[i + 1] - x[i]
        if d > tol_coll and d < g:
            g = d
    return g


@njit(cache=True, nogil=True)
def _min_abs_nonzero(x):
    a = np.inf
    for i in range(x.shape[0]):
        v = abs(x[i])
        if v > 0.0 and v < a:
            a = v
    return a


@njit(cache=True, nogil=True)
def _check_signs(x, t, tol_zero, hit_t, neg_t, xmin):
    for i in range(x.shape[0]):
        if x[i] < xmin[i]:
            xmin[i] = x[i]
        if x[i] <= tol_zero and np.isnan(hit_t[i]):
            hit_t[i] = t
        if x[i] < -tol_zero and np.isnan(neg_t[i]):
            neg_t[i] = t


@njit(cache=True, nogil=True)
def _run_particles(
    x, alpha, dt, n_steps, units, tol_coll, tol_zero, stop_at_zero, split_ties,
    mask, states, pos, k, z, zpos, hit_t, neg_t, xmin, cap_info,
):
    p = x.shape[0]
    c = p * (1.0 + abs(alpha))
    c2 = c * c
    drift = np.empty(p)
    xn = np.empty(p)
    while k < n_steps:
        if zpos + units * p > z.shape[0]:
            return _NEED_NOISE, k, zpos, pos
        elapsed = 0
        while elapsed < units:
            hu = units if elapsed == 0 else (elapsed & -elapsed)
            h = hu * dt / units
            g = _min_gap(x, tol_coll)
            r = _min_abs_nonzero(x)
            while hu > 1 and (g * g < h * c2 or r < ZERO_STEP_FACTOR * h):
                hu //= 2
                h = hu * dt / units
            if g * g < h * c2:
                cap_info[0] += 1.0
                if np.isnan(cap_info[1]):
                    cap_info[1] = k * dt + elapsed * dt / units
            _particle_step(x, alpha, h, z, zpos, tol_coll, stop_at_zero, split_ties, drift, xn)
            zpos += p
            elapsed += hu
            for i in range(p):
                if not np.isfinite(xn[i]):
                    return _NONFINITE, k, zpos, pos
                x[i] = xn[i]
            _check_signs(x, (k + elapsed / units) * dt, tol_zero, hit_t, neg_t, xmin)
        k += 1
        if mask[k]:
            states[pos, :] = x
            pos += 1
    return _DONE, k, zpos, pos


def step_particles(
    x,
    params: SystemParams,
    dt: float,
    noise,
    tol_coll: float = 1e-12,
    stop_at_zero: bool = True,
    split_zero_ties: bool = True,
) -> np.ndarray:
    """One Euler step of the particle system, re-sorted.

    ``noise`` are standard normals (Brownian increments over ``sqrt(dt)``).
    Pairs closer than ``tol_coll`` count as colliding and drop out of the
    drift. See the module docstring for the zero-crossing and zero-tie rules;
    both can be switched off to get the literal scheme.

    >>> from besq.domain import SystemParams
    >>> step_particles([1.0, 3.0], SystemParams(2, 2.0), 0.1, [0.0, 0.0])
    array([1. , 3.4])
    """
    x = particle_config(x, params.p)
    z = np.asarray(noise, dtype=float).ravel()
    if z.shape[0] != params.p:
        raise ValueError(f"need {params.p} noise values, got {z.shape[0]}")
    if not dt > 0:
        raise ValueError("dt must be positive")
    out = np.empty_like(x)
    _particle_step(x, params.alpha, dt, z, 0, tol_coll, stop_at_zero, split_zero_ties, np.empty_like(x), out)
    if not np.all(np.isfinite(out)):
        raise PathAborted(f"non-finite particle state after step from {x.tolist()}")
    return out


def _drive(kernel, stream, per_step, n_steps, units):
    """Run ``kernel(z, zpos)`` and top up its noise buffer until it stops."""
    z = stream.draw(n_steps * per_step + units * per_step)
    zpos = 0
    while True:
        status, zpos = kernel(z, zpos)
        if status != _NEED_NOISE:
            return status
        z = np.concatenate([z[zpos:], stream.draw(max(n_steps * per_step // 4, units * per_step * 16))])
        zpos = 0


def _sign_events(hit_t, neg_t) -> list[Event]:
    events = []
    for i, t in enumerate(hit_t, start=1):
        if not np.isnan(t):
            events.append(Event("hit_zero", float(t), index=(i,)))
    for i, t in enumerate(neg_t, start=1):
        if not np.isnan(t):
            events.append(Event("went_negative", float(t), index=(i,)))
    return events


def _collision_events(times, states, tol_coll) -> list[Event]:
    events = []
    if states.shape[1] < 2:
        return events
    close = np.abs(np.diff(states, axis=1)) <= tol_coll
    for j in range(close.shape[1]):
        idx = np.flatnonzero(close[:, j])
        if idx.size:
            events.append(Event("collision", float(times[idx[0]]), value=float(idx.size), index=(j + 1, j + 2)))
    return events


def _meta(params, grid, rng, **extra):
    meta = {"p": params.p, "alpha": params.alpha, "t_end": grid.t_end, "dt": grid.dt,
            "seed": rng.seed, "stream": list(rng.stream), "zero_noise": rng.zero_noise}
    meta.update(extra)
    return meta


def simulate_particles(
    params: SystemParams,
    x0,
    grid: SimulationGrid,
    rng: RngSpec,
    split_zero_ties: bool = True,
    stop_at_zero: bool = True,
) -> PathRecord:
    """Simulate the ordered particle system with adaptive substepping.

    Within a base step the local step ``h`` is halved, down to
    ``dt / substep_cap``, while the smallest gap ``g`` between distinct
    neighbours satisfies ``g**2 < h * c**2`` with ``c = p * (1 + |alpha|)``.
    Hitting the floor with that condition still violated is logged as a
    ``substep_cap`` event (first time, with the count as value).

    The step is also halved while some nonzero particle lies within
    ``64 * h`` of the origin, so that crossings of zero come from genuine
    approach rather than overshoot of a coarse step.
    """
    x = particle_config(x0, params.p).copy()
    mask = grid.record_mask()
    n_rec = int(mask.sum())
    states = np.empty((n_rec, params.p))
    states[0] = x
    hit_t = np.full(params.p, np.nan)
    neg_t = np.full(params.p, np.nan)
    xmin = np.full(params.p, np.inf)
    _check_signs(x, 0.0, grid.tol_zero, hit_t, neg_t, xmin)
    cap_info = np.array([0.0, np.nan])
    units = grid.substep_units
    st = {"k": 0, "pos": 1}

    def kernel(z, zpos):
        status, st["k"], zpos, st["pos"] = _run_particles(
            x, params.alpha, grid.dt, grid.n_steps, units, grid.tol_coll, grid.tol_zero,
            stop_at_zero, split_zero_ties, mask, states, st["pos"], st["k"], z, zpos,
            hit_t, neg_t, xmin, cap_info,
        )
        return status, zpos

    status = _drive(kernel, gaussian_stream(rng), params.p, grid.n_steps, units)
    times = np.flatnonzero(mask)[: st["pos"]] * grid.dt
    path = PathRecord("particles", times, states[: st["pos"]], meta=_meta(params, grid, rng), minima=xmin)
    path.events = _sign_events(hit_t, neg_t) + _collision_events(times, path.states, grid.tol_coll)
    if cap_info[0] > 0:
        path.events.append(Event("substep_cap", float(cap_info[1]), value=float(cap_info[0])))
    if status == _NONFINITE:
        raise PathAborted(f"non-finite particle state near t={st['k'] * grid.dt:g}", path)
    return path


# -- Wishart kernel ----------------------------------------------------------


@njit(cache=True, nogil=True)
def _run_wishart(Y, alpha, dt, n_steps, tol_zero, mask, eig_states, mats, pos, k, z, zpos, hit_t, neg_t, xmin):
    p = Y.shape[0]
    sdt = math.sqrt(dt)
    per = p * p
    while k < n_steps:
        if zpos + per > z.shape[0]:
            return _NEED_NOISE, k, zpos, pos
        lam, Q = _jacobi_eigh(Y)
        S = np.zeros((p, p))
        for c in range(p):
            r = math.sqrt(abs(lam[c]))
            if r == 0.0:
                continue
            for i in range(p):
                qi = Q[i, c] * r
                for j in range(p):
                    S[i, j] += qi * Q[j, c]
        G = np.empty((p, p))
        for i in range(p):
            for j in range(p):
                G[i, j] = z[zpos + i * p + j]
        zpos += per
        SG = S @ G
        Yn = Y + sdt * (SG + SG.T)
        for i in range(p):
            Yn[i, i] += alpha * dt
        for i in range(p):
            for j in range(p):
                v = 0.5 * (Yn[i, j] + Yn[j, i])
                if not np.isfinite(v):
                    return _NONFINITE, k, zpos, pos
                Y[i, j] = v
        k += 1
        lam, Q = _jacobi_eigh(Y)
        _check_signs(lam, k * dt, tol_zero, hit_t, neg_t, xmin)
        if mask[k]:
            eig_states[pos, :] = lam
            mats[pos, :, :] = Y
            pos += 1
    return _DONE, k, zpos, pos


def simulate_wishart(params: SystemParams, Y0, grid: SimulationGrid, rng: RngSpec) -> PathRecord:
    """Euler scheme for the matrix equation; snapshots are ordered eigenvalues.

    ``Y' = Y + sqrt(dt) (S G + G^T S) + alpha I dt`` with ``S = sqrt|Y|``
    (spectral) and ``G`` a matrix of independent standard normals, followed
    by re-symmetrization. The matrices themselves are kept in ``matrices``.
    """
    Y = as_symmetric(Y0).copy()
    p = params.p
    if Y.shape != (p, p):
        raise ValueError(f"Y0 must be {p}x{p}, got {Y.shape}")
    mask = grid.record_mask()
    n_rec = int(mask.sum())
    eig_states = np.empty((n_rec, p))
    mats = np.empty((n_rec, p, p))
    lam0, _ = _jacobi_eigh(Y)
    eig_states[0] = lam0
    mats[0] = Y
    hit_t = np.full(p, np.nan)
    neg_t = np.full(p, np.nan)
    xmin = np.full(p, np.inf)
    _check_signs(lam0, 0.0, grid.tol_zero, hit_t, neg_t, xmin)
    st = {"k": 0, "pos": 1}

    def kernel(z, zpos):
        status, st["k"], zpos, st["pos"] = _run_wishart(
            Y, params.alpha, grid.dt, grid.n_steps, grid.tol_zero, mask, eig_states, mats,
            st["pos"], st["k"], z, zpos, hit_t, neg_t, xmin,
        )
        return status, zpos

    status = _drive(kernel, gaussian_stream(rng), p * p, grid.n_steps, 1)
    times = np.flatnonzero(mask)[: st["pos"]] * grid.dt
    path = PathRecord(
        "wishart", times, eig_states[: st["pos"]], matrices=mats[: st["pos"]],
        meta=_meta(params, grid, rng), minima=xmin,
    )
    path.events = _sign_events(hit_t, neg_t) + _collision_events(times, path.states, grid.tol_coll)
    if status == _NONFINITE:
        raise PathAborted(f"non-finite matrix entries near t={st['k'] * grid.dt:g}", path)
    return path


# -- polynomial kernel -------------------------------------------------------


@njit(cache=True, nogil=True)
def _run_polys(
    e, alpha, dt, n_steps, tol_zero, tol_psd, stop_at_zero, mask, states, parts, pos, k, z, zpos,
    hit_t, neg_t, xmin, proj_info, exit_info,
):
    p = e.shape[0] - 1
    sdt = math.sqrt(dt)
    en = np.empty(p + 1)
    cur_min = _real_roots(e, p)[0]
    while k < n_steps:
        if zpos + p > z.shape[0]:
            return _NEED_NOISE, k, zpos, pos
        S = _bracket_matrix(e, p)
        lam, Q = _jacobi_eigh(S)
        top = 0.0
        for i in range(p):
            if abs(lam[i]) > top:
                top = abs(lam[i])
        if lam[0] < -tol_psd * top:
            exit_info[1] = lam[0] / top
            return _INDEFINITE, k, zpos, pos
        en[0] = 1.0
        for n in range(1, p + 1):
            en[n] = e[n] + (p - n + 1) * (alpha - (n - 1)) * e[n - 1] * dt
        for c in range(p):
            w = math.sqrt(max(lam[c], 0.0)) * z[zpos + c] * sdt
            if w == 0.0:
                continue
            for n in range(p):
                en[n + 1] += Q[n, c] * w
        zpos += p
        for n in range(p + 1):
            if not np.isfinite(en[n]):
                return _NONFINITE, k, zpos, pos
        k += 1
        roots = _real_roots(en, p)
        res = _root_residual(en, roots)
        if res > proj_info[0]:
            proj_info[0] = res
            proj_info[1] = k * dt
        project = res > PROJECTION_TOL
        if project:
            proj_info[2] += 1.0
        if stop_at_zero and cur_min > 0.0 and roots[0] < 0.0:
            # crossing step: land the negative roots on zero
            for i in range(p):
                if roots[i] < 0.0:
                    roots[i] = 0.0
            proj_info[3] += 1.0
            project = True
        if project:
            en[:] = _elementary(roots)
        e[:] = en
        cur_min = roots[0]
        _check_signs(roots, k * dt, tol_zero, hit_t, neg_t, xmin)
        if mask[k] or roots[0] < -tol_zero:
            states[pos, :] = e[1:]
            parts[pos, :] = roots
            pos += 1
        if roots[0] < -tol_zero:
            exit_info[0] = k * dt
            return _EXITED, k, zpos, pos
    return _DONE, k, zpos, pos


def simulate_polys(
    params: SystemParams, e0, grid: SimulationGrid, rng: RngSpec, stop_at_zero: bool = True,
) -> PathRecord:
    """Correlated Euler scheme for ``(e_1, ..., e_p)``.

    ``de = L z sqrt(dt) + drift dt`` with ``L L^T`` the closed-form bracket
    matrix and the closed-form drift. A state that drifts off the real-rooted
    set is projected onto the polynomial of its (projected) real roots; the
    largest residual is logged as a ``projection_residual`` event. The path
    stops at the first step whose smallest root is below ``-tol_zero`` (an
    ``exit`` event), which is the horizon of the closed-form equations.

    As for particles, a step that carries the smallest root from strictly
    positive to negative is clipped so those roots land on zero (counted in
    ``meta['zero_clips']``). From a root at zero the variance of ``e_p``
    vanishes and the sign of its drift, ``(alpha - p + 1) e_{p-1}``, decides
    whether the path exits on the next step.
    """
    p = params.p
    e = np.asarray(e0, dtype=float).ravel().copy()
    if e.shape[0] == p:
        e = np.r_[1.0, e]
    roots, residual = roots_with_residual(e, p)
    if residual > 1e-8:
        raise ValueError(f"e0 is not the polynomial vector of real particles (residual {residual:.2e})")
    if roots[0] < -grid.tol_zero:
        raise ValueError("e0 must come from non-negative particles")
    mask = grid.record_mask()
    n_rec = int(mask.sum()) + 1
    states = np.empty((n_rec, p))
    parts = np.empty((n_rec, p))
    states[0] = e[1:]
    parts[0] = roots
    hit_t = np.full(p, np.nan)
    neg_t = np.full(p, np.nan)
    xmin = np.full(p, np.inf)
    _check_signs(roots, 0.0, grid.tol_zero, hit_t, neg_t, xmin)
    proj_info = np.zeros(4)
    exit_info = np.array([np.nan, np.nan])
    st = {"k": 0, "pos": 1}

    def kernel(z, zpos):
        status, st["k"], zpos, st["pos"] = _run_polys(
            e, params.alpha, grid.dt, grid.n_steps, grid.tol_zero, TOL_PSD, stop_at_zero, mask, states, parts,
            st["pos"], st["k"], z, zpos, hit_t, neg_t, xmin, proj_info, exit_info,
        )
        return status, zpos

    status = _drive(kernel, gaussian_stream(rng), p, grid.n_steps, 1)
    rec_steps = np.flatnonzero(mask)
    pos = st["pos"]
    times = rec_steps[:pos] * grid.dt
    if status == _EXITED:
        times = np.r_[rec_steps[: pos - 1] * grid.dt, exit_info[0]]
        if times.size > 1 and times[-1] == times[-2]:
            times = times[:-1]
            states[pos - 2] = states[pos - 1]
            parts[pos - 2] = parts[pos - 1]
            pos -= 1
    path = PathRecord(
        "polys", times, states[:pos], particles=parts[:pos], meta=_meta(params, grid, rng), minima=xmin,
    )
    path.events = _sign_events(hit_t, neg_t) + _collision_events(times, path.particles, grid.tol_coll)
    path.events.append(
        Event("projection_residual", float(proj_info[1]), value=float(proj_info[0]))
    )
    path.meta["projections"] = int(proj_info[2])
    path.meta["zero_clips"] = int(proj_info[3])
    if status == _EXITED:
        path.events.append(Event("exit", float(exit_info[0]), value=float(parts[pos - 1, 0])))
    elif status == _INDEFINITE:
        raise PathAborted(
            f"bracket matrix indefinite near t={st['k'] * grid.dt:g} "
            f"(relative eigenvalue {exit_info[1]:.2e})", path,
        )
    elif status == _NONFINITE:
        raise PathAborted(f"non-finite polynomial state near t={st['k'] * grid.dt:g}", path)
    return path
