"""Dense complex linear algebra.

Matrices are ``numpy`` arrays of dtype ``complex128`` (pairs of doubles).
The scalar routines here (``solve``, ``eig_general``, ``eig_hermitian``,
``is_positive_definite``) are written out explicitly so their tolerances are
under our control; numpy only supplies storage and elementwise arithmetic.

The ``batched_*`` helpers at the bottom are the exception: sweeps evaluate
thousands of tiny matrices, and those go through LAPACK via numpy's stacked
routines.
"""
from __future__ import annotations

import numpy as np

from .errors import NoConvergence, NotHermitian, SingularMatrix

HERMITIAN_RTOL = 1e-12
PIVOT_RTOL = 1e-14


def as_matrix(x) -> np.ndarray:
    a = np.array(x, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def max_abs(x) -> float:
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def conj_transpose(x) -> np.ndarray:
    return np.conj(as_matrix(x)).T


def herm_part(x) -> np.ndarray:
    """Return ``X + X*`` for a square ``X``."""
    a = as_matrix(x)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"herm_part needs a square matrix, got {a.shape}")
    return a + np.conj(a).T


def is_hermitian(x, rtol: float = HERMITIAN_RTOL) -> bool:
    a = np.asarray(x)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return max_abs(a - np.conj(a).T) <= rtol * (1.0 + max_abs(a))


def _check_hermitian(a):
    if not is_hermitian(a):
        raise NotHermitian("matrix is not Hermitian within tolerance")


def solve(a, b) -> np.ndarray:
    """Solve ``A X = B`` by Gaussian elimination with partial pivoting.

    Raises SingularMatrix when a pivot falls below ``1e-14 * max|A|``.
    """
    a = as_matrix(a).copy()
    b = np.array(b, dtype=complex)
    vector_rhs = b.ndim == 1
    if vector_rhs:
        b = b.reshape(-1, 1)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError(f"solve needs a square matrix, got {a.shape}")
    if b.shape[0] != n:
        raise ValueError(f"row mismatch: A is {a.shape}, B is {b.shape}")
    b = b.copy()
    scale = max_abs(a)
    floor = PIVOT_RTOL * scale
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if scale == 0.0 or abs(a[p, k]) <= floor:
            raise SingularMatrix(f"pivot {abs(a[p, k]):.3e} at column {k} below {floor:.3e}")
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        piv = a[k, k]
        if k + 1 < n:
            factors = a[k + 1:, k] / piv
            a[k + 1:, k:] -= np.outer(factors, a[k, k:])
            b[k + 1:] -= np.outer(factors, b[k])
    x = np.zeros_like(b)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x.ravel() if vector_rhs else x


def hessenberg(a) -> np.ndarray:
    """Unitary similarity to upper Hessenberg form (Householder)."""
    h = as_matrix(a).copy()
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        h[k + 1:, :] -= 2.0 * np.outer(v, np.conj(v) @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, np.conj(v))
        h[k + 2:, k] = 0.0
    return h


def _wilkinson_shift(a, b, c, d):
    half = 0.5 * (a - d)
    disc = np.sqrt(half * half + b * c)
    mid = 0.5 * (a + d)
    mu1, mu2 = mid + disc, mid - disc
    return mu1 if abs(mu1 - d) < abs(mu2 - d) else mu2


def _qr_sweep(w, mu):
    """One shifted QR step ``W - mu I = QR -> RQ + mu I`` on a Hessenberg window."""
    m = w.shape[0]
    w[np.diag_indices(m)] -= mu
    rots = []
    for k in range(m - 1):
        x, y = w[k, k], w[k + 1, k]
        r = np.hypot(abs(x), abs(y))
        if r == 0.0:
            c, s = 1.0 + 0j, 0j
        else:
            c, s = x / r, y / r
        g = np.array([[np.conj(c), np.conj(s)], [-s, c]])
        w[k:k + 2, k:] = g @ w[k:k + 2, k:]
        rots.append(g)
    for k, g in enumerate(rots):
        hi = min(k + 3, m)
        w[:hi, k:k + 2] = w[:hi, k:k + 2] @ np.conj(g).T
    w[np.diag_indices(m)] += mu


def eig_general(x) -> list[complex]:
    """All eigenvalues (with multiplicity) of a square matrix.

    Hessenberg reduction followed by single-shift complex QR with Wilkinson
    shifts. Raises NoConvergence after ``100 * n`` QR steps.
    """
    a = as_matrix(x)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError(f"eig_general needs a square matrix, got {a.shape}")
    if n > 200:
        raise ValueError("eig_general supports dimension <= 200")
    h = hessenberg(a)
    eps = np.finfo(float).eps
    tiny = np.finfo(float).tiny / eps
    eigs: list[complex] = []
    hi = n - 1
    steps = 0
    stuck = 0
    while hi >= 0:
        if hi == 0:
            eigs.append(complex(h[0, 0]))
            break
        lo = hi
        while lo > 0:
            sub = abs(h[lo, lo - 1])
            if sub <= eps * (abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])) or sub < tiny:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eigs.append(complex(h[hi, hi]))
            hi -= 1
            stuck = 0
            continue
        steps += 1
        stuck += 1
        if steps > 100 * n:
            raise NoConvergence(f"QR iteration did not converge in {100 * n} steps")
        if stuck % 11 == 10:
            # exceptional shift to break cycles
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1]) * (1 + 1j)
        else:
            mu = _wilkinson_shift(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        win = h[lo:hi + 1, lo:hi + 1]
        _qr_sweep(win, mu)
        h[lo:hi + 1, lo:hi + 1] = win
    return eigs[::-1]


def eig_hermitian(x, max_sweeps: int = 100) -> list[float]:
    """Real eigenvalues of a Hermitian matrix, ascending, by cyclic Jacobi sweeps."""
    a = as_matrix(x)
    _check_hermitian(a)
    a = 0.5 * (a + np.conj(a).T)
    n = a.shape[0]
    target = 1e-12 * max_abs(a)
    for _ in range(max_sweeps):
        off = np.abs(a - np.diag(np.diag(a)))
        if n < 2 or off.max() <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g <= 0.1 * target:
                    continue
                e = apq / g
                tau = (a[q, q].real - a[p, p].real) / (2.0 * g)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                u = np.array([[c, s], [-s * np.conj(e), c * np.conj(e)]])
                cols = a[:, [p, q]] @ u
                a[:, [p, q]] = cols
                rows = np.conj(u).T @ a[[p, q], :]
                a[[p, q], :] = rows
                a[q, p] = 0.0
                a[p, q] = 0.0
    else:
        raise NoConvergence("Jacobi sweeps did not converge")
    return sorted(float(v) for v in np.diag(a).real)


def cholesky(x) -> np.ndarray | None:
    """Lower Cholesky factor of a Hermitian matrix, or None if a pivot is <= 0."""
    a = as_matrix(x)
    n = a.shape[0]
    low = np.zeros_like(a)
    for j in range(n):
        d = a[j, j].real - float(np.sum(np.abs(low[j, :j]) ** 2))
        if not d > 0.0:
            return None
        low[j, j] = np.sqrt(d)
        if j + 1 < n:
            low[j + 1:, j] = (a[j + 1:, j] - low[j + 1:, :j] @ np.conj(low[j, :j])) / low[j, j]
    return low


def is_positive_definite(x, margin: float = 0.0) -> bool:
    """True iff the Cholesky factorization of ``X - margin*I`` succeeds."""
    a = as_matrix(x)
    _check_hermitian(a)
    shifted = a - margin * np.eye(a.shape[0])
    return cholesky(shifted) is not None


def smallest_singular_value(x) -> float:
    return float(np.linalg.svd(as_matrix(x), compute_uv=False)[-1])


# -- batched helpers (LAPACK-backed, used on sweep hot paths) ----------------

def batched_eigvals(stack: np.ndarray) -> np.ndarray:
    return np.linalg.eigvals(stack)


def batched_min_eigvalsh(stack: np.ndarray) -> np.ndarray:
    """Smallest eigenvalue of each Hermitian matrix in a ``(..., k, k)`` stack."""
    sym = 0.5 * (stack + np.conj(np.swapaxes(stack, -1, -2)))
    return np.linalg.eigvalsh(sym)[..., 0]


def real_embedding(h: np.ndarray) -> np.ndarray:
    """Map Hermitian ``H`` (or a stack) to the real symmetric ``[[Re, -Im], [Im, Re]]``."""
    re, im = h.real, h.imag
    top = np.concatenate([re, -im], axis=-1)
    bottom = np.concatenate([im, re], axis=-1)
    return np.concatenate([top, bottom], axis=-2)
