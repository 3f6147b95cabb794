"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion k: PASS|FAIL ...`` line, whether or not
its assertions hold. Tolerances, sample sizes and runtime limits are the ones
the criteria state; nothing here is tuned to make a check pass.
"""

import itertools
import time

import numpy as np
import pytest

from besq.analysis import (
    below_indicator,
    combined_z,
    drift_regression_ep,
    e_at,
    hit_indicator,
    integrated_bracket,
    mc_estimate_many,
    mc_values,
    min_gap_over,
    moment_curve,
    realized_covariation,
)
from besq.constructions import build_non_unique
from besq.domain import SystemParams, classify_strong_uniqueness
from besq.rng import PARTICLES, POLYS, RngSpec
from besq.sde import SimulationGrid, simulate_particles, simulate_polys
from besq.sympoly import elementary_all
from besq.verification import run_suite

pytestmark = pytest.mark.slow


@pytest.fixture
def report(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")

    return emit


# -- 1, 2: exact algebra and round trip ---------------------------------------------


def test_criterion_1_algebra_suite(report):
    t0 = time.perf_counter()
    results = []
    for name in ("identities", "coefficients", "brackets"):
        results += run_suite(name, p_max=8, cases=500, seed=1)
    elapsed = time.perf_counter() - t0
    comb = results[0]
    ok = all(r.passed for r in results) and comb.cases == 325 and elapsed < 30
    worst = max(r.worst for r in results[1:] if r.tol > 0 and "PSD" not in r.name)
    report(1, ok, f"worst rel err {worst:.2e}, comb failures {int(comb.worst)}, {elapsed:.1f}s")
    for r in results:
        assert r.passed, r.row()
    assert comb.cases == 325
    assert elapsed < 30


def test_criterion_2_roundtrip(report):
    t0 = time.perf_counter()
    (res,) = run_suite("roundtrip", p_max=8, cases=1000, seed=2)
    elapsed = time.perf_counter() - t0
    ok = res.passed and elapsed < 10
    report(2, ok, f"worst abs err {res.worst:.2e} over {res.cases} configs, {elapsed:.1f}s")
    assert res.passed
    assert elapsed < 10


# -- 3, 4: moments and agreement between representations ------------------------------

P2A3 = SystemParams(2, 3.0)
X0 = [1.0, 2.0]
T_MOM = 0.5


@pytest.fixture(scope="module")
def moment_runs():
    grid = SimulationGrid(T_MOM, 1e-3, record_every=500)
    stats = {"e1": e_at(1, T_MOM), "e2": e_at(2, T_MOM)}
    t0 = time.perf_counter()
    runs = {
        "particles": mc_estimate_many(stats, P2A3, X0, grid, 10_000, RngSpec(3)),
        "polys": mc_estimate_many(stats, P2A3, X0, grid, 10_000, RngSpec(3), model="polys"),
        "wishart": mc_estimate_many(stats, P2A3, np.diag(X0), grid, 10_000, RngSpec(3), model="wishart"),
    }
    return runs, time.perf_counter() - t0


def test_criterion_3_moments(moment_runs, report):
    runs, elapsed = moment_runs
    exact = moment_curve(P2A3, elementary_all(X0)[1:], T_MOM)
    assert np.allclose(exact, [1.0, 6.0, 6.5])
    z = {(m, k): runs[m][k].z_score(exact[int(k[1])]) for m in runs for k in ("e1", "e2")}
    complete = all(runs[m][k].completion_rate == 1.0 for m in runs for k in ("e1", "e2"))
    ok = all(abs(v) <= 3 for v in z.values()) and complete and elapsed < 300
    detail = ", ".join(f"{m}/{k} z={v:+.2f}" for (m, k), v in z.items())
    report(3, ok, f"{detail}, {elapsed:.0f}s")
    for key, v in z.items():
        assert abs(v) <= 3, key
    assert complete
    assert elapsed < 300


def test_criterion_4_representation_agreement(moment_runs, report):
    runs, _ = moment_runs
    pairs = list(itertools.combinations(runs, 2))
    z = {(a, b): combined_z(runs[a]["e1"], runs[b]["e1"]) for a, b in pairs}
    ok = all(abs(v) <= 3 for v in z.values())
    report(4, ok, ", ".join(f"{a}-{b} z={v:+.2f}" for (a, b), v in z.items()))
    for key, v in z.items():
        assert abs(v) <= 3, key


# -- 5: sign structure ------------------------------------------------------------


def test_criterion_5_sign_structure(report):
    t0 = time.perf_counter()
    grid = SimulationGrid(20.0, 1e-3, record_every=20_000)
    level = 10 * grid.tol_zero
    half = mc_estimate_many({"neg1": below_indicator(1, level), "neg2": below_indicator(2, level)},
                            SystemParams(2, 0.5), [0.5, 1.0], grid, 2000, RngSpec(5))
    one = mc_estimate_many({"neg1": below_indicator(1, level), "hit1": hit_indicator(1)},
                           SystemParams(2, 1.0), [0.5, 1.0], grid, 2000, RngSpec(5))
    elapsed = time.perf_counter() - t0
    checks = {
        "a=0.5 X2 below <= 1%": half["neg2"].estimate <= 0.01,
        "a=0.5 X1 below >= 90%": half["neg1"].estimate >= 0.90,
        "a=1 X1 below <= 1%": one["neg1"].estimate <= 0.01,
        "a=1 hit_zero(1) >= 90%": one["hit1"].estimate >= 0.90,
        "runtime < 10 min": elapsed < 600,
    }
    report(5, all(checks.values()),
           f"a=0.5: P(X1<0)={half['neg1'].estimate:.3f} P(X2<0)={half['neg2'].estimate:.4f}; "
           f"a=1: P(X1<0)={one['neg1'].estimate:.4f} P(hit1)={one['hit1'].estimate:.3f}; {elapsed:.0f}s")
    for name, passed in checks.items():
        assert passed, name


# -- 6: non-uniqueness witness ------------------------------------------------------


def test_criterion_6_non_uniqueness(report):
    t0 = time.perf_counter()
    params, x0 = SystemParams(3, 1.0), [0.0, 0.0, 1.0]
    grid = SimulationGrid(1.0, 1e-3)
    unique = classify_strong_uniqueness(params, x0)
    held = build_non_unique(params, x0, grid, RngSpec(6))
    zero_block = bool(np.all(held.states[:, :2] == 0.0))
    gaps = mc_values({"gap": min_gap_over(0.1, 1.0)}, params, x0, grid, 500, RngSpec(6))["gap"]
    frac = float(np.mean(gaps > 10 * grid.tol_coll))
    elapsed = time.perf_counter() - t0
    ok = (not unique) and zero_block and frac >= 0.95 and elapsed < 120
    report(6, ok, f"unique={unique}, X1=X2=0 held={zero_block}, separated fraction {frac:.3f}, {elapsed:.0f}s")
    assert not unique
    assert zero_block
    assert frac >= 0.95
    assert elapsed < 120


# -- 7: drift regression --------------------------------------------------------------


def test_criterion_7_drift_regression(report):
    t0 = time.perf_counter()
    params, x0 = SystemParams(2, 3.0), [1.0, 2.0]
    grid = SimulationGrid(0.5, 1e-3)
    base = RngSpec(7)
    paths = [simulate_particles(params, x0, grid, base.replicate(r, PARTICLES)) for r in range(200)]
    s = drift_regression_ep(paths, params)
    elapsed = time.perf_counter() - t0
    ok = s.contains(2.0) and elapsed < 60
    report(7, ok, f"c = {s.estimate:.3f} +- {s.std_error:.3f}, CI [{s.ci95[0]:.3f}, {s.ci95[1]:.3f}], {elapsed:.1f}s")
    assert s.contains(2.0)
    assert elapsed < 60


# -- 8: bracket along paths ---------------------------------------------------------


def test_criterion_8_bracket_consistency(report):
    t0 = time.perf_counter()
    params = SystemParams(3, 4.0)
    e0 = elementary_all([1.0, 2.0, 3.0])
    grid = SimulationGrid(0.1, 1e-4)
    base = RngSpec(8)
    pairs = [(n, m) for n in range(1, 4) for m in range(n, 4)]
    realized = dict.fromkeys(pairs, 0.0)
    integrated = dict.fromkeys(pairs, 0.0)
    for r in range(50):
        path = simulate_polys(params, e0, grid, base.replicate(r, POLYS))
        for nm in pairs:
            realized[nm] += realized_covariation(path, *nm) / 50
            integrated[nm] += integrated_bracket(path, *nm) / 50
    elapsed = time.perf_counter() - t0
    rel = {nm: abs(realized[nm] - integrated[nm]) / abs(integrated[nm]) for nm in pairs}
    ok = all(v <= 0.15 for v in rel.values()) and elapsed < 120
    report(8, ok, f"max relative gap {max(rel.values()):.4f} over (n,m) in {pairs}, {elapsed:.1f}s")
    for nm, v in rel.items():
        assert v <= 0.15, nm
    assert elapsed < 120


# -- 9: classification ----------------------------------------------------------------


def unique_oracle(p, alpha, x):
    """Restated uniqueness rule: condition (a) on |alpha|, else the rank test with
    2 n* in {p + a, p + a + 1}; negative alpha goes through (-alpha, -reversed x)."""
    if not (float(abs(alpha)).is_integer() and 0 <= abs(alpha) <= p - 2):
        return True
    if alpha < 0:
        alpha, x = -alpha, [-v for v in reversed(x)]
    a = int(alpha)
    ns = next(n for n in range(p + 1) if 2 * n in (p + a, p + a + 1))
    pos = sum(v > 0 for v in x)
    neg = sum(v < 0 for v in x)
    return pos > ns or neg > p - ns


def test_criterion_9_classification(report):
    t0 = time.perf_counter()
    mismatches, asym = [], []
    n_cases = 0
    for p in range(2, 7):
        for alpha in range(-(p - 2), p - 1):
            for signs in itertools.product((-1, 0, 1), repeat=p):
                x = sorted(signs)
                got = classify_strong_uniqueness(SystemParams(p, alpha), x)
                n_cases += 1
                if got != unique_oracle(p, alpha, x):
                    mismatches.append((p, alpha, tuple(x)))
                mirrored = classify_strong_uniqueness(SystemParams(p, -alpha), [-v for v in reversed(x)])
                if got != mirrored:
                    asym.append((p, alpha, tuple(x)))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and not asym and elapsed < 5
    distinct = sorted(set(asym))
    example = f", e.g. p={distinct[0][0]} alpha={distinct[0][1]} x={distinct[0][2]}" if asym else ""
    report(9, ok, f"{n_cases} sign patterns: oracle mismatches {len(mismatches)}, reflection violations "
                  f"{len(asym)} ({len(distinct)} distinct sorted x){example}, {elapsed:.2f}s")
    assert not mismatches
    assert elapsed < 5
    assert not asym, f"reflection invariance fails at {distinct}"
