"""sl(2) generators on even polynomials and the spectrum of H0 on its finite module.

A polynomial phi(x) = sum_j a_j x^(2j) is stored by its half-degree coefficients.
On that basis the generators act as

    J-  x^(2j) = j x^(2j-2)
    J0  x^(2j) = (j - n/2) x^(2j)
    J+  x^(2j) = (j - n) x^(2j+2)

so span{x^(2j) : 0 <= j <= n} is invariant and H0 acts on it as a
tridiagonal matrix.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .linalg import symmetric_tridiagonal_eig

GENERATORS = ("J-", "J0", "J+")


@dataclass(frozen=True)
class ModelParams:
    n: int
    k: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 0:
            raise ValueError(f"n must be a non-negative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not self.k >= 0:
            raise ValueError(f"k must be >= 0, got {self.k!r}")
        if not math.isfinite(self.beta):
            raise ValueError(f"beta must be finite, got {self.beta!r}")

    def as_dict(self) -> dict:
        return {"n": self.n, "k": float(self.k), "beta": float(self.beta)}


class EvenPolynomial:
    """phi(x) = sum_j coeffs[j] * x**(2j); the degree bound is len(coeffs) - 1."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = coeffs if type(coeffs) is np.ndarray else np.asarray(coeffs)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficient vector must be 1-d and non-empty")
        if c.dtype.kind not in "fc":
            c = c.astype(np.float64)
        self.coeffs = c

    @property
    def degree_bound(self) -> int:
        return self.coeffs.size - 1

    @classmethod
    def monomial(cls, j: int, bound: int | None = None) -> "EvenPolynomial":
        c = np.zeros((j if bound is None else bound) + 1)
        c[j] = 1.0
        return cls(c)

    def padded(self, bound: int) -> np.ndarray:
        if bound < self.degree_bound:
            raise ValueError("cannot pad to a smaller degree bound")
        out = np.zeros(bound + 1, dtype=self.coeffs.dtype)
        out[: self.coeffs.size] = self.coeffs
        return out

    def __add__(self, other: "EvenPolynomial") -> "EvenPolynomial":
        a, b = self.coeffs, other.coeffs
        if a.size < b.size:
            a, b = b, a
        out = a.astype(np.result_type(a, b), copy=True)
        out[: b.size] += b
        return EvenPolynomial(out)

    def __sub__(self, other: "EvenPolynomial") -> "EvenPolynomial":
        return self + (-1.0) * other

    def __rmul__(self, s) -> "EvenPolynomial":
        return EvenPolynomial(s * self.coeffs)

    def __call__(self, x):
        """Horner evaluation in x**2."""
        y = np.asarray(x) ** 2
        acc = np.zeros_like(y, dtype=np.result_type(y, self.coeffs)) + self.coeffs[-1]
        for a in self.coeffs[-2::-1]:
            acc = acc * y + a
        return acc

    def __repr__(self):
        return f"EvenPolynomial({self.coeffs.tolist()})"


def apply_generator(which: str, n: int, p: EvenPolynomial) -> EvenPolynomial:
    a = p.coeffs
    j = np.arange(a.size)
    if which == "J-":
        if a.size == 1:
            return EvenPolynomial(np.zeros(1, dtype=a.dtype))
        return EvenPolynomial((j * a)[1:])
    if which == "J0":
        return EvenPolynomial((j - 0.5 * n) * a)
    if which == "J+":
        out = np.zeros(a.size + 1, dtype=a.dtype)
        out[1:] = (j - n) * a
        return EvenPolynomial(out)
    raise ValueError(f"unknown generator {which!r}; expected one of {GENERATORS}")


def apply_h0(params: ModelParams, p: EvenPolynomial) -> EvenPolynomial:
    """H0 = -J-J0 + J+ + beta J0 - (n+2k-1)/2 J- + beta/2 (n+k+1/2), applied term by term."""
    n, k, beta = params.n, params.k, params.beta
    Jm = lambda q: apply_generator("J-", n, q)  # noqa: E731
    J0 = lambda q: apply_generator("J0", n, q)  # noqa: E731
    Jp = lambda q: apply_generator("J+", n, q)  # noqa: E731
    return (
        (-1.0) * Jm(J0(p))
        + Jp(p)
        + beta * J0(p)
        + (-0.5 * (n + 2 * k - 1)) * Jm(p)
        + (0.5 * beta * (n + k + 0.5)) * p
    )


@dataclass(frozen=True)
class TridiagonalMatrix:
    """``upper[m]`` sits at (m, m+1) and ``lower[m]`` at (m+1, m)."""

    diag: np.ndarray
    upper: np.ndarray
    lower: np.ndarray

    def __post_init__(self):
        n = len(self.diag)
        if len(self.upper) != n - 1 or len(self.lower) != n - 1:
            raise ValueError("band lengths inconsistent with the diagonal")

    @property
    def size(self) -> int:
        return len(self.diag)

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.upper, 1) + np.diag(self.lower, -1)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.upper * v[1:]
        out[1:] += self.lower * v[:-1]
        return out

    def inf_norm(self) -> float:
        r = np.abs(self.diag).astype(float)
        r[:-1] += np.abs(self.upper)
        r[1:] += np.abs(self.lower)
        return float(r.max())


def h0_bands(params: ModelParams) -> TridiagonalMatrix:
    """Closed-form bands of H0 on the module."""
    n, k, beta = params.n, params.k, params.beta
    m = np.arange(n + 1, dtype=float)
    diag = beta * (m + (2 * k + 1) / 4.0)
    mu = m[:-1]
    upper = -(mu + 1) * (mu + k + 0.5)
    lower = mu - n
    return TridiagonalMatrix(diag, upper, lower)


def build_h0_matrix(params: ModelParams) -> TridiagonalMatrix:
    """Matrix of H0 on span{x^(2j)}, assembled column by column from the generators.

    The composition result is checked against :func:`h0_bands`.
    """
    n = params.n
    dense = np.zeros((n + 1, n + 1))
    for j in range(n + 1):
        col = apply_h0(params, EvenPolynomial.monomial(j, n)).coeffs
        assert col.size == n + 2, "H0 raises the degree bound by exactly one"
        assert col[n + 1] == 0.0, f"x^(2(n+1)) coefficient {col[n + 1]} survived for column {j}"
        dense[:, j] = col[: n + 1]
    off = dense - np.diag(np.diag(dense))
    off -= np.diag(np.diag(dense, 1), 1) + np.diag(np.diag(dense, -1), -1)
    assert not off.any(), "H0 matrix has fill outside the three bands"
    m = TridiagonalMatrix(np.diag(dense).copy(), np.diag(dense, 1).copy(), np.diag(dense, -1).copy())
    ref = h0_bands(params)
    for name in ("diag", "upper", "lower"):
        got, want = getattr(m, name), getattr(ref, name)
        scale = max(1.0, float(np.abs(want).max(initial=0.0)))
        assert np.all(np.abs(got - want) <= 1e-14 * scale), f"{name} band disagrees with closed form"
    return m


def symmetrizer(m: TridiagonalMatrix) -> np.ndarray:
    """Diagonal D with D^-1 M D symmetric: D_0 = 1, D_{m+1} = D_m sqrt(lower_m / upper_m)."""
    prod = m.upper * m.lower
    if np.any(prod < 0):
        bad = int(np.flatnonzero(prod < 0)[0])
        raise ValueError(f"matrix is not symmetrizable: upper*lower < 0 at index {bad}")
    if np.any(prod == 0):
        # block-reducible; unreachable for k >= 0 since upper_m <= -1/2
        raise ValueError("zero off-diagonal coupling; matrix is block-reducible")
    ratio = np.sqrt(m.lower / m.upper)
    return np.concatenate(([1.0], np.cumprod(ratio)))


def symmetrized(m: TridiagonalMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of D^-1 M D; the off-diagonal carries the sign of the bands."""
    off = np.sign(m.upper) * np.sqrt(m.upper * m.lower)
    return np.asarray(m.diag, dtype=float), off


@dataclass
class SpectralData:
    params: ModelParams | None
    eigenvalues: np.ndarray
    eigenvectors: list[EvenPolynomial]

    def as_dict(self) -> dict:
        return {
            "params": None if self.params is None else self.params.as_dict(),
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "eigenvectors": [[float(c) for c in p.coeffs] for p in self.eigenvectors],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralData":
        params = None if d.get("params") is None else ModelParams(**d["params"])
        return cls(
            params,
            np.asarray(d["eigenvalues"], dtype=float),
            [EvenPolynomial(v) for v in d["eigenvectors"]],
        )


def _normalize(a: np.ndarray) -> np.ndarray:
    a = a / np.linalg.norm(a)
    nz = np.flatnonzero(np.abs(a) > 1e-14 * np.abs(a).max())
    if a[nz[0]] < 0:
        a = -a
    return a


def eigensolve(m: TridiagonalMatrix, params: ModelParams | None = None) -> SpectralData:
    """Real eigenpairs of M, ascending, with unit-norm sign-fixed coefficient vectors."""
    if m.size == 1:
        return SpectralData(params, np.array([float(m.diag[0])]), [EvenPolynomial([1.0])])
    D = symmetrizer(m)
    d, off = symmetrized(m)
    w, Z = symmetric_tridiagonal_eig(d, off)
    vecs = [EvenPolynomial(_normalize(D * Z[:, i])) for i in range(m.size)]
    gaps = np.diff(w)
    scale = max(1.0, float(np.abs(w).max()))
    if gaps.min() <= 1e-10 * scale:
        warnings.warn(
            f"near-degenerate H0 eigenvalues: minimum gap {gaps.min():.3e}", RuntimeWarning, stacklevel=2
        )
    return SpectralData(params, w, vecs)


def spectrum(params: ModelParams) -> SpectralData:
    return eigensolve(build_h0_matrix(params), params)


def eigen_residual(m: TridiagonalMatrix, s: SpectralData) -> float:
    """max_i |M a_i - lambda_i a_i|_inf / (|M|_inf |a_i|_inf)."""
    norm_m = m.inf_norm()
    worst = 0.0
    for lam, p in zip(s.eigenvalues, s.eigenvectors):
        a = p.coeffs
        r = np.abs(m.matvec(a) - lam * a).max()
        denom = norm_m * np.abs(a).max()
        if denom == 0:
            if r > 0:
                return math.inf
            continue
        worst = max(worst, float(r / denom))
    return worst


def symmetric_gram(m: TridiagonalMatrix, s: SpectralData) -> np.ndarray:
    """Gram matrix of the unit-normalized vectors D^-1 a_i, which are orthonormal in exact arithmetic."""
    if m.size == 1:
        return np.ones((1, 1))
    Dinv = 1.0 / symmetrizer(m)
    V = np.column_stack([Dinv * p.coeffs for p in s.eigenvectors])
    V /= np.linalg.norm(V, axis=0)
    return V.T @ V
