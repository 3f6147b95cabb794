"""Self-check suites for the polynomial algebra.

Each suite draws random configurations from a seeded generator, compares two
independent computations of the same quantity and returns one
:class:`CheckResult` per named check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import TOL_PSD, sym_eigen
from .sympoly import (
    bracket_direct,
    bracket_matrix_closed,
    comb_identity,
    diffusion_sq_closed,
    drift_closed,
    drift_direct,
    elementary_all,
    identity_simple_brack,
    roots_from_polys,
)

SUITES = ("identities", "coefficients", "roundtrip", "brackets")


@dataclass
class CheckResult:
    name: str
    cases: int
    worst: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.worst <= self.tol

    def row(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name:<28} {self.cases:>8d} {self.worst:>12.3e} {self.tol:>10.1e}  {status}"


def table(results: list[CheckResult]) -> str:
    head = f"{'check':<28} {'cases':>8} {'worst':>12} {'tol':>10}  status"
    return "\n".join([head] + [r.row() for r in results])


def _rel(a: float, b: float, scale: float = 0.0) -> float:
    den = max(abs(a), abs(b), scale)
    return 0.0 if den == 0 else abs(a - b) / den


def nonneg_configs(rng: np.random.Generator, p: int, cases: int) -> list[np.ndarray]:
    """Sorted non-negative configurations, some with exact zeros and ties."""
    out = []
    for c in range(cases):
        x = rng.uniform(0.0, 3.0, p)
        if c % 5 == 1:
            x[: rng.integers(1, p + 1)] = 0.0
        elif c % 5 == 2 and p >= 2:
            i = rng.integers(0, p - 1)
            x[i + 1] = x[i]
        out.append(np.sort(x))
    return out


def separated_configs(rng: np.random.Generator, p_max: int, cases: int, min_gap: float = 0.1):
    """Sorted configurations on ``[-3, 3]`` with all gaps at least ``min_gap``."""
    out = []
    while len(out) < cases:
        p = int(rng.integers(1, p_max + 1))
        x = np.sort(rng.uniform(-3.0, 3.0, p))
        if p == 1 or np.diff(x).min() >= min_gap:
            out.append(x)
    return out


def check_comb(j_max: int = 25) -> CheckResult:
    bad = 0
    cases = 0
    for j in range(1, j_max + 1):
        for N in range(j):
            lhs, rhs = comb_identity(j, N)
            cases += 1
            bad += lhs != rhs
    return CheckResult("comb_identity (exact)", cases, float(bad), 0.0)


def suite_identities(p_max: int = 8, cases: int = 500, seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    n_cases = 0
    for p in range(2, p_max + 1):
        for x in nonneg_configs(rng, p, cases):
            for n in range(1, p + 1):
                for m in range(n, p + 1):
                    lhs, rhs = identity_simple_brack(x, n, m)
                    worst = max(worst, _rel(lhs, rhs))
                    n_cases += 1
    return [check_comb(), CheckResult("simple_brack lhs = rhs", n_cases, worst, 1e-10)]


def suite_coefficients(p_max: int = 8, cases: int = 500, seed: int = 0) -> list[CheckResult]:
    """Drift of ``e_n`` from incomplete sums against the closed form.

    The drift is a difference of two non-negative sums, so the error is
    measured relative to their size ``(p - n + 1)(|alpha| + n - 1) e_{n-1}``.
    """
    rng = np.random.default_rng(seed)
    worst_drift = worst_diag = 0.0
    n_drift = n_diag = 0
    for p in range(2, p_max + 1):
        for c, x in enumerate(nonneg_configs(rng, p, cases)):
            alpha = float(rng.integers(0, p + 2)) if c % 2 else float(rng.uniform(-2.0, p + 2.0))
            e = elementary_all(x)
            for n in range(1, p + 1):
                direct = drift_direct(x, n, alpha)
                closed = drift_closed(e, n, p, alpha)
                scale = (p - n + 1) * (abs(alpha) + (n - 1)) * e[n - 1]
                worst_drift = max(worst_drift, _rel(direct, closed, scale))
                n_drift += 1
                full = diffusion_sq_closed(e, n)
                cut = diffusion_sq_closed(e, n, truncate=True)
                worst_diag = max(worst_diag, abs(full - cut))
                n_diag += 1
    return [
        CheckResult("drift direct = closed", n_drift, worst_drift, 1e-10),
        CheckResult("diffusion K-truncation", n_diag, worst_diag, 0.0),
    ]


def suite_brackets(p_max: int = 8, cases: int = 500, seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    worst_psd = 0.0
    n_cases = n_psd = 0
    for p in range(2, p_max + 1):
        for x in nonneg_configs(rng, p, cases):
            S = bracket_matrix_closed(elementary_all(x), p)
            for n in range(1, p + 1):
                for m in range(n, p + 1):
                    worst = max(worst, _rel(bracket_direct(x, n, m), S[n - 1, m - 1]))
                    n_cases += 1
            lam, _ = sym_eigen(S)
            norm = np.abs(lam).max()
            if norm > 0:
                worst_psd = max(worst_psd, -lam[0] / norm)
            n_psd += 1
    return [
        CheckResult("bracket direct = closed", n_cases, worst, 1e-10),
        CheckResult("bracket matrix PSD", n_psd, worst_psd, TOL_PSD),
    ]


def suite_roundtrip(p_max: int = 8, cases: int = 1000, seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for x in separated_configs(rng, p_max, cases):
        back = roots_from_polys(elementary_all(x))
        worst = max(worst, float(np.abs(back - x).max()))
    return [CheckResult("roots(elementary(x)) = x", cases, worst, 1e-8)]


def run_suite(name: str, p_max: int = 8, cases: int = 500, seed: int = 0) -> list[CheckResult]:
    fn = {
        "identities": suite_identities,
        "coefficients": suite_coefficients,
        "roundtrip": suite_roundtrip,
        "brackets": suite_brackets,
    }.get(name)
    if fn is None:
        raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    return fn(p_max=p_max, cases=cases, seed=seed)
