"""Tridiagonal kernels: implicit-shift QL eigensolver and a complex Thomas solver.

Both are compiled with numba; the Python wrappers own validation and error
reporting, the kernels return status codes.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

MAX_QL_ITERATIONS = 50


class ConvergenceError(ArithmeticError):
    pass


class SingularPivotError(ArithmeticError):
    pass


@njit(cache=True)
def _tqli(d, e, z, want_vectors):
    # d: diagonal (overwritten with eigenvalues); e: subdiagonal with e[i]
    # coupling i and i+1, length n, last entry ignored; z: accumulates rotations.
    n = d.shape[0]
    if n == 0:
        return -1
    e[n - 1] = 0.0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) + dd == dd:
                    break
                m += 1
            if m == l:
                break
            if it == 50:
                return l
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if want_vectors:
                    for k in range(z.shape[0]):
                        f = z[k, i + 1]
                        z[k, i + 1] = s * z[k, i] + c * f
                        z[k, i] = c * z[k, i] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


def symmetric_tridiagonal_eig(diag, offdiag, vectors=True):
    """Eigen-decomposition of a real symmetric tridiagonal matrix.

    Returns ``(w, V)`` with eigenvalues ascending and eigenvectors as the
    columns of ``V`` (``V`` is ``None`` when ``vectors`` is false).
    """
    d = np.array(diag, dtype=np.float64)
    n = d.size
    if n == 0:
        raise ValueError("empty matrix")
    off = np.asarray(offdiag, dtype=np.float64)
    if off.size != n - 1:
        raise ValueError(f"off-diagonal has length {off.size}, expected {n - 1}")
    e = np.zeros(n)
    e[: n - 1] = off
    z = np.eye(n) if vectors else np.zeros((0, 0))
    failed = _tqli(d, e, z, vectors)
    if failed >= 0:
        raise ConvergenceError(
            f"QL iteration did not converge for eigenvalue {failed} within {MAX_QL_ITERATIONS} sweeps"
        )
    order = np.argsort(d, kind="stable")
    w = d[order]
    if not vectors:
        return w, None
    return w, z[:, order]


@njit(cache=True)
def _thomas(lower, diag, upper, rhs, out, work):
    n = diag.shape[0]
    beta = diag[0]
    if abs(beta) == 0.0:
        return 0
    out[0] = rhs[0] / beta
    for i in range(1, n):
        work[i] = upper[i - 1] / beta
        beta = diag[i] - lower[i - 1] * work[i]
        if abs(beta) == 0.0:
            return i
        out[i] = (rhs[i] - lower[i - 1] * out[i - 1]) / beta
    for i in range(n - 2, -1, -1):
        out[i] -= work[i + 1] * out[i + 1]
    return -1


def solve_tridiagonal(lower, diag, upper, rhs):
    """Solve a (complex) tridiagonal system without pivoting.

    ``lower[i]`` is the entry at row i+1, column i; ``upper[i]`` at row i, column i+1.
    """
    diag = np.ascontiguousarray(diag, dtype=np.complex128)
    lower = np.ascontiguousarray(lower, dtype=np.complex128)
    upper = np.ascontiguousarray(upper, dtype=np.complex128)
    rhs = np.ascontiguousarray(rhs, dtype=np.complex128)
    n = diag.size
    if lower.size != n - 1 or upper.size != n - 1 or rhs.size != n:
        raise ValueError("inconsistent band lengths")
    out = np.empty(n, dtype=np.complex128)
    work = np.empty(n, dtype=np.complex128)
    bad = _thomas(lower, diag, upper, rhs, out, work)
    if bad >= 0:
        raise SingularPivotError(f"zero pivot at row {bad}")
    return out
