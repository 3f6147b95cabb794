"""Elementary symmetric polynomials of particle configurations.

A polynomial vector ``e`` is stored as a length ``p + 1`` array with
``e[0] == 1``; indices outside ``0..p`` read as zero through :func:`ecoef`.
Bracket matrices are 0-based: ``S[n - 1, m - 1]`` is the covariation rate
of ``(e_n, e_m)``.

Most functions accept plain floats. The pure-Python helpers (``*_exact``)
work with any numeric type closed under ``+`` and ``*`` (``int``,
``fractions.Fraction``) and are used as exact oracles.
"""

from __future__ import annotations

from math import comb

import numpy as np
from numba import njit

ROOT_RESIDUAL_TOL = 1e-8


class NotRealRootedError(ValueError):
    """Raised when a coefficient vector has no real-rooted preimage."""

    def __init__(self, residual: float, roots: np.ndarray):
        super().__init__(f"polynomial is not real-rooted (residual {residual:.3e})")
        self.residual = residual
        self.roots = roots


def ecoef(e, r: int):
    """``e[r]`` with the convention ``e_r = 0`` for ``r < 0`` or ``r > p``."""
    if r < 0 or r >= len(e):
        return 0
    return e[r]


@njit(cache=True, nogil=True)
def _elementary(x):
    p = x.shape[0]
    e = np.zeros(p + 1)
    e[0] = 1.0
    for i in range(p):
        # multiply prod(t + x_j) by (t + x_i), highest degree first
        for k in range(i + 1, 0, -1):
            e[k] += x[i] * e[k - 1]
    return e


def elementary_all(x) -> np.ndarray:
    """All elementary symmetric polynomials ``(e_0, ..., e_p)`` of ``x``.

    >>> elementary_all([1.0, 2.0, 3.0])
    array([ 1.,  6., 11.,  6.])
    """
    return _elementary(np.asarray(x, dtype=float).ravel())


def elementary_all_exact(x) -> list:
    """Same recurrence as :func:`elementary_all` in exact arithmetic."""
    e = [1] + [0] * len(x)
    for i, xi in enumerate(x):
        for k in range(i + 1, 0, -1):
            e[k] = e[k] + xi * e[k - 1]
    return e


def incomplete(x, n: int, excluded=()) -> float:
    """Elementary symmetric polynomial of degree ``n`` skipping ``excluded``.

    ``excluded`` holds 1-based particle indices.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    skip = {int(j) for j in excluded}
    rest = [xi for i, xi in enumerate(x, start=1) if i not in skip]
    if n > len(rest):
        return 0.0
    if n == 0:
        return 1.0
    return float(elementary_all(rest)[n])


def _incomplete_table(x, exact: bool = False):
    """Return ``(single, pair)``: degree vectors with one or two indices removed.

    ``single[i][r] = e_r^{i}`` and ``pair[i][j][r] = e_r^{i,j}`` (0-based).
    """
    p = len(x)
    elem = elementary_all_exact if exact else (lambda v: list(elementary_all(v)))
    single = [elem([x[k] for k in range(p) if k != i]) for i in range(p)]
    pair = [[None] * p for _ in range(p)]
    for i in range(p):
        for j in range(i + 1, p):
            pair[i][j] = pair[j][i] = elem([x[k] for k in range(p) if k not in (i, j)])
    return single, pair


def _drift_direct(x, n, alpha, exact):
    p = len(x)
    single, pair = _incomplete_table(x, exact)
    total = 0
    for i in range(p):
        total = total + alpha * ecoef(single[i], n - 1)
    for i in range(p):
        for j in range(i + 1, p):
            total = total - (abs(x[i]) + abs(x[j])) * ecoef(pair[i][j], n - 2)
    return total


def drift_direct(x, n: int, alpha: float) -> float:
    """Drift rate of ``e_n(X)`` from incomplete-polynomial sums.

    Absolute values are kept, so the formula is valid for particles of any
    sign (between collisions).
    """
    x = [float(v) for v in np.asarray(x, dtype=float).ravel()]
    _check_degree(n, len(x))
    return float(_drift_direct(x, n, alpha, exact=False))


def drift_direct_exact(x, n: int, alpha):
    _check_degree(n, len(x))
    return _drift_direct(list(x), n, alpha, exact=True)


def drift_closed(e, n: int, p: int, alpha: float) -> float:
    """Closed-form drift ``(p - n + 1)(alpha - (n - 1)) e_{n-1}``."""
    _check_degree(n, p)
    return (p - n + 1) * (alpha - (n - 1)) * ecoef(e, n - 1)


def diffusion_sq_closed(e, n: int, truncate: bool = False) -> float:
    """Squared diffusion coefficient of ``e_n``: ``4 sum_k (2k-1) e_{n-k} e_{n+k-1}``.

    With ``truncate=True`` the sum stops at ``K = min(n, p + 1 - n)``, past
    which every term has a vanishing factor.
    """
    p = len(e) - 1
    _check_degree(n, p)
    K = min(n, p + 1 - n) if truncate else p
    return 4 * sum((2 * k - 1) * ecoef(e, n - k) * ecoef(e, n + k - 1) for k in range(1, K + 1))


@njit(cache=True, nogil=True)
def _bracket_matrix(e, p):
    S = np.zeros((p, p))
    for n in range(1, p + 1):
        for m in range(n, p + 1):
            s = 0.0
            for k in range(1, p + 1):
                a = n - k
                b = m + k - 1
                if a < 0 or b > p:
                    continue
                s += (m - n + 2 * k - 1) * e[a] * e[b]
            S[n - 1, m - 1] = 4.0 * s
            S[m - 1, n - 1] = 4.0 * s
    return S


def bracket_matrix_closed(e, p: int | None = None) -> np.ndarray:
    """Covariation-rate matrix of ``(e_1, ..., e_p)`` from the closed form.

    ``S[n-1, m-1] = 4 sum_k (m - n + 2k - 1) e_{n-k} e_{m+k-1}`` for
    ``n <= m``, mirrored below the diagonal.
    """
    e = np.asarray(e, dtype=float)
    if p is None:
        p = e.shape[0] - 1
    if e.shape[0] != p + 1:
        raise ValueError(f"expected {p + 1} coefficients, got {e.shape[0]}")
    return _bracket_matrix(e, p)


def bracket_direct(x, n: int, m: int) -> float:
    """``4 sum_i |x_i| e_{n-1}^{i} e_{m-1}^{i}`` from incomplete polynomials."""
    x = np.asarray(x, dtype=float).ravel()
    p = x.shape[0]
    _check_degree(n, p)
    _check_degree(m, p)
    single, _ = _incomplete_table(list(x))
    return 4.0 * float(sum(abs(x[i]) * ecoef(single[i], n - 1) * ecoef(single[i], m - 1) for i in range(p)))


def _simple_brack(x, n, m, exact):
    p = len(x)
    if not 1 <= n <= m <= p:
        raise ValueError(f"need 1 <= n <= m <= p, got n={n}, m={m}, p={p}")
    if any(v < 0 for v in x):
        raise ValueError("identity is stated for non-negative particles only")
    elem = elementary_all_exact if exact else (lambda v: list(elementary_all(v)))
    single, _ = _incomplete_table(x, exact)
    lhs = sum((x[i] * ecoef(single[i], n - 1) * ecoef(single[i], m - 1) for i in range(p)), 0)
    e = elem(x)
    rhs = sum(((m - n + 2 * k - 1) * ecoef(e, n - k) * ecoef(e, m + k - 1) for k in range(1, p + 1)), 0)
    return lhs, rhs


def identity_simple_brack(x, n: int, m: int) -> tuple[float, float]:
    """Both sides of the bracket identity for non-negative particles.

    Left: ``sum_i x_i e_{n-1}^{i} e_{m-1}^{i}``.
    Right: ``sum_k (m - n + 2k - 1) e_{n-k} e_{m+k-1}``.
    """
    x = [float(v) for v in np.asarray(x, dtype=float).ravel()]
    lhs, rhs = _simple_brack(x, n, m, exact=False)
    return float(lhs), float(rhs)


def identity_simple_brack_exact(x, n: int, m: int):
    return _simple_brack(list(x), n, m, exact=True)


def comb_identity(j: int, N: int) -> tuple[int, int]:
    """``sum_{r=0}^{N} (j - 2r) C(j, r)`` and ``(N + 1) C(j, N + 1)``.

    Python integers are unbounded, so the comparison is exact at any size.
    """
    j, N = int(j), int(N)
    if j < 1 or not 0 <= N <= j - 1:
        raise ValueError(f"need j >= 1 and 0 <= N <= j - 1, got j={j}, N={N}")
    lhs = sum((j - 2 * r) * comb(j, r) for r in range(N + 1))
    rhs = (N + 1) * comb(j, N + 1)
    return lhs, rhs


def _check_degree(n, p):
    if not 1 <= n <= p:
        raise ValueError(f"degree n={n} outside 1..p={p}")


# -- inverse map: coefficients -> ordered roots ------------------------------


@njit(cache=True, nogil=True)
def _horner(c, t):
    v = c[0]
    for k in range(1, c.shape[0]):
        v = v * t + c[k]
    return v


@njit(cache=True, nogil=True)
def _bisect(c, a, b):
    fa = _horner(c, a)
    fb = _horner(c, b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        # no sign change: double root or complex pair; take the better end
        return a if abs(fa) <= abs(fb) else b
    for _ in range(300):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        fm = _horner(c, mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (fa > 0.0):
            a = mid
            fa = fm
        else:
            b = mid
    return 0.5 * (a + b)


@njit(cache=True, nogil=True)
def _real_roots(e, p):
    """Ordered real roots of ``t^p - e1 t^{p-1} + ... + (-1)^p e_p``.

    Roots of each derivative interlace those of the one above, so the
    brackets for degree ``d`` come from the (already found) roots of
    degree ``d - 1``. Without real roots, bisection degrades to the closest
    critical point, which is the projection used for drifted paths.
    """
    # monic descending coefficients of P
    c = np.empty(p + 1)
    sign = 1.0
    for k in range(p + 1):
        c[k] = sign * e[k]
        sign = -sign
    roots = np.empty(0)
    for deg in range(1, p + 1):
        # monic (p - deg)-th derivative of P, rescaled
        q = np.empty(deg + 1)
        for k in range(deg + 1):
            w = 1.0
            # (p-k)!/(deg-k)! divided by p!/deg!
            for s in range(deg - k + 1, p - k + 1):
                w *= s
            for s in range(deg + 1, p + 1):
                w /= s
            q[k] = c[k] * w
        if deg == 1:
            roots = np.array([-q[1]])
            continue
        bound = 0.0
        for k in range(1, deg + 1):
            if abs(q[k]) > bound:
                bound = abs(q[k])
        bound += 1.0
        new = np.empty(deg)
        lo = -bound
        for i in range(deg):
            hi = roots[i] if i < deg - 1 else bound
            if hi < lo:
                hi = lo
            new[i] = _bisect(q, lo, hi)
            lo = hi
        roots = np.sort(new)
    return roots


@njit(cache=True, nogil=True)
def _root_residual(e, roots):
    p = roots.shape[0]
    back = _elementary(roots)
    scale = 0.0
    for k in range(1, p + 1):
        s = abs(e[k]) ** (1.0 / k)
        if s > scale:
            scale = s
    if scale == 0.0:
        scale = 1.0
    res = 0.0
    binom = 1.0
    for k in range(1, p + 1):
        binom = binom * (p - k + 1) / k
        r = abs(back[k] - e[k]) / (binom * scale**k)
        if r > res:
            res = r
    return res


def _as_polyvector(e, p):
    e = np.asarray(e, dtype=float).ravel()
    if p is None:
        p = e.shape[0] - 1
    if e.shape[0] != p + 1:
        raise ValueError(f"expected {p + 1} coefficients (including e_0), got {e.shape[0]}")
    if e[0] != 1.0:
        raise ValueError("e_0 must equal 1")
    if not np.all(np.isfinite(e)):
        raise ValueError("coefficients must be finite")
    return e, p


def roots_with_residual(e, p: int | None = None) -> tuple[np.ndarray, float]:
    """Ordered (possibly projected) roots and the scaled coefficient residual."""
    e, p = _as_polyvector(e, p)
    if p == 0:
        return np.empty(0), 0.0
    roots = _real_roots(e, p)
    return roots, float(_root_residual(e, roots))


def roots_from_polys(e, p: int | None = None, tol: float = ROOT_RESIDUAL_TOL) -> np.ndarray:
    """Invert :func:`elementary_all`: ordered particles with the given ``e``.

    Raises :class:`NotRealRootedError` when the recovered roots reproduce
    ``e`` only to a scaled residual above ``tol``.

    >>> roots_from_polys([1.0, 1.0, -2.0])
    array([-1.,  2.])
    """
    roots, residual = roots_with_residual(e, p)
    if residual > tol:
        raise NotRealRootedError(residual, roots)
    return roots
