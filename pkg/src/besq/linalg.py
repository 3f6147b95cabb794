"""Small dense symmetric linear algebra.

Everything here is sized for desk-scale systems (p <= 16 or so). The eigen
solver is a cyclic Jacobi iteration compiled with numba so that the Wishart
and polynomial simulators can call it once per time step.
"""

from __future__ import annotations

import numpy as np
from numba import njit

TOL_PSD = 1e-9
_MAX_SWEEPS = 60


@njit(cache=True, nogil=True)
def _jacobi_eigh(A):
    """Cyclic Jacobi with threshold sweeps; returns ascending (lam, Q)."""
    n = A.shape[0]
    a = A.copy()
    V = np.eye(n)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += a[i, j] * a[i, j]
    scale = np.sqrt(scale)
    if scale == 0.0 or n == 1:
        lam = np.empty(n)
        for i in range(n):
            lam[i] = a[i, i]
        return lam, V

    for sweep in range(_MAX_SWEEPS):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += a[i, j] * a[i, j]
        off = np.sqrt(off)
        if off <= 1e-17 * scale:
            break
        # larger threshold in the first sweeps skips tiny rotations early
        thresh = 0.2 * off / (n * n) if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh or apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - s * vkq
                    V[k, q] = s * vkp + c * vkq

    lam = np.empty(n)
    for i in range(n):
        lam[i] = a[i, i]
    order = np.argsort(lam)
    lam_sorted = np.empty(n)
    Q = np.empty((n, n))
    for j in range(n):
        lam_sorted[j] = lam[order[j]]
        for i in range(n):
            Q[i, j] = V[i, order[j]]
    return lam_sorted, Q


@njit(cache=True, nogil=True)
def _abs_sqrt(Y):
    lam, Q = _jacobi_eigh(Y)
    n = Y.shape[0]
    S = np.zeros((n, n))
    for k in range(n):
        r = np.sqrt(abs(lam[k]))
        if r == 0.0:
            continue
        for i in range(n):
            qi = Q[i, k] * r
            for j in range(n):
                S[i, j] += qi * Q[j, k]
    return S


def as_symmetric(Y, rtol: float = 1e-10) -> np.ndarray:
    """Validate a square matrix and return its symmetric part.

    Relative asymmetry above ``rtol`` is treated as a caller error rather
    than silently averaged away.
    """
    Y = np.array(Y, dtype=float, ndmin=2)
    if Y.ndim != 2 or Y.shape[0] != Y.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {Y.shape}")
    if not np.all(np.isfinite(Y)):
        raise ValueError("matrix has non-finite entries")
    norm = np.linalg.norm(Y)
    if norm > 0 and np.linalg.norm(Y - Y.T) > rtol * norm:
        raise ValueError("matrix is not symmetric")
    return 0.5 * (Y + Y.T)


def sym_eigen(Y) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition ``Y = Q diag(lam) Q^T`` with ``lam`` ascending."""
    Y = as_symmetric(Y)
    return _jacobi_eigh(Y)


def matrix_abs_sqrt(Y) -> np.ndarray:
    """Spectral square root of the matrix absolute value, ``sqrt(|Y|)``.

    For indefinite ``Y`` the absolute value is taken on the eigenvalues, so
    ``diag(-4)`` maps to ``diag(2)``.
    """
    return _abs_sqrt(as_symmetric(Y))


def psd_factor(S, tol_psd: float = TOL_PSD) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T`` equal to the PSD part of ``S``.

    Eigenvalues in ``[-tol_psd * ||S||, 0)`` are clipped to zero; anything
    more negative means the matrix is not a covariance and is rejected.

    Examples
    --------
    >>> psd_factor([[4.0, 2.0], [2.0, 1.0]]).round(12)
    array([[2., 0.],
           [1., 0.]])
    """
    S = as_symmetric(S)
    n = S.shape[0]
    lam, Q = _jacobi_eigh(S)
    norm = np.linalg.norm(S, 2) if n else 0.0
    if n and lam[0] < -tol_psd * norm:
        raise ValueError(
            f"matrix is indefinite: smallest eigenvalue {lam[0]:.3e} "
            f"below -{tol_psd:g} * ||S|| = {-tol_psd * norm:.3e}"
        )
    F = Q * np.sqrt(np.clip(lam, 0.0, None))
    # F F^T = S_+; QR of F^T turns F into a lower-triangular factor
    R = np.linalg.qr(F.T, mode="r")
    L = R.T.copy()
    signs = np.where(np.diag(L) < 0, -1.0, 1.0)
    return L * signs
