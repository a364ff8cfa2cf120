"""Independent checks of the closed form: PDE residual, quadrature norms, orthogonality."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson

from .algebra import ModelParams, SpectralData
from .model import SuperpositionSpec, WaveField, potential, psi_closed_form
from .pump import PumpProfile

Sampler = Callable[[np.ndarray, float], np.ndarray]

UNDERFLOW_CUTOFF = 1e-12


class VerificationConfigError(ValueError):
    pass


@dataclass
class ResidualReport:
    dx: float
    dtau: float
    order: int
    max_rel_residual: float
    interior_points: int
    mutation: str | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def grid_spacing(x: np.ndarray, rtol: float = 1e-9) -> float:
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        raise VerificationConfigError("grid needs at least two points")
    d = np.diff(x)
    h = (x[-1] - x[0]) / (x.size - 1)
    if not h > 0 or np.max(np.abs(d - h)) > rtol * max(abs(h), np.abs(x).max()):
        raise VerificationConfigError("grid is not uniform")
    return float(h)


def uniform_grid(x_lo: float, x_hi: float, dx: float) -> np.ndarray:
    count = int(round((x_hi - x_lo) / dx))
    return x_lo + dx * np.arange(count + 1)


def pde_residual(
    sampler: Sampler,
    params: ModelParams,
    profile: PumpProfile,
    grid,
    t: float,
    dtau: float,
    mutation: str | None = None,
) -> ResidualReport:
    """Residual of i psi_t = -psi_xx + V psi with fourth-order central differences in x and t."""
    x = np.asarray(grid, dtype=float)
    dx = grid_spacing(x)
    if x.size < 5:
        raise VerificationConfigError(f"grid of {x.size} points is too coarse for a 5-point stencil")
    if not dtau > 0:
        raise VerificationConfigError("dtau must be positive")
    if t - 2 * dtau < 0:
        raise VerificationConfigError(f"t - 2 dtau = {t - 2 * dtau} falls before t=0")

    f_m2, f_m1, f_0, f_p1, f_p2 = (sampler(x, t + s * dtau) for s in (-2, -1, 0, 1, 2))
    psi_t = (f_m2 - 8.0 * f_m1 + 8.0 * f_p1 - f_p2) / (12.0 * dtau)
    psi = f_0
    psi_xx = (
        -psi[:-4] + 16.0 * psi[1:-3] - 30.0 * psi[2:-2] + 16.0 * psi[3:-1] - psi[4:]
    ) / (12.0 * dx * dx)
    xi = x[2:-2]
    pi = psi[2:-2]
    vpsi = potential(params, profile, xi, t, mutation) * pi
    r = 1j * psi_t[2:-2] + psi_xx - vpsi
    keep = np.abs(pi) > UNDERFLOW_CUTOFF * np.abs(psi).max()
    if not keep.any():
        raise VerificationConfigError("wavefunction underflows on the whole interior")
    scale = np.max(np.abs(psi_xx[keep]) + np.abs(vpsi[keep]))
    rel = float(np.max(np.abs(r[keep])) / scale)
    return ResidualReport(dx, dtau, 4, rel, int(keep.sum()), mutation)


def refinement_ladder(
    sampler: Sampler,
    params: ModelParams,
    profile: PumpProfile,
    t: float,
    x_lo: float,
    x_hi: float,
    dx0: float,
    levels: int = 3,
    dtau_ratio: float = 0.1,
    mutation: str | None = None,
    jobs: int = 1,
) -> list[ResidualReport]:
    """Residuals on dyadically refined grids with dtau = dtau_ratio * dx."""
    dxs = [dx0 / 2**i for i in range(levels)]

    def run(dx):
        return pde_residual(sampler, params, profile, uniform_grid(x_lo, x_hi, dx), t, dtau_ratio * dx, mutation)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run, dxs))
    return [run(dx) for dx in dxs]


def convergence_slopes(reports: Sequence[ResidualReport]) -> tuple[float, list[float]]:
    """Least-squares log-log slope of residual vs dx, and the consecutive-level slopes."""
    h = np.log([r.dx for r in reports])
    e = np.log([r.max_rel_residual for r in reports])
    fit = float(np.polyfit(h, e, 1)[0])
    pair = [float((e[i] - e[i + 1]) / (h[i] - h[i + 1])) for i in range(len(reports) - 1)]
    return fit, pair


def _integrate(x: np.ndarray, f: np.ndarray, whole_line: bool):
    grid_spacing(x)
    val = simpson(f, x=x)
    return 2 * val if whole_line else val


def norm(field: WaveField) -> float:
    """Integral of |psi|^2 (Simpson)."""
    return float(_integrate(field.x, np.abs(field.values) ** 2, field.whole_line))


def inner(a: WaveField, b: WaveField) -> complex:
    """Integral of conj(a) b (Simpson)."""
    if a.x.shape != b.x.shape or not np.array_equal(a.x, b.x):
        raise VerificationConfigError("inner product needs both fields on the same grid")
    if a.whole_line != b.whole_line:
        raise VerificationConfigError("cannot mix whole-line and half-line fields")
    return complex(_integrate(a.x, np.conj(a.values) * b.values, a.whole_line))


def gauged_modes(params: ModelParams, spectral: SpectralData, grid) -> np.ndarray:
    """Rows y^k exp(-y^4/4 - beta y^2/2) phi_j(y), the modes at u = 1."""
    y = np.asarray(grid, dtype=float)
    env = np.exp(-0.25 * y**4 - 0.5 * params.beta * y**2)
    if params.k != 0:
        env = env * np.power(y, params.k)
    return np.array([env * p(y) for p in spectral.eigenvectors])


def orthogonality_matrix(params: ModelParams, spectral: SpectralData, grid) -> np.ndarray:
    """Normalized Gram matrix of the gauged eigenfunctions (unit diagonal)."""
    y = np.asarray(grid, dtype=float)
    g = gauged_modes(params, spectral, y)
    m = len(g)
    G = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            G[i, j] = G[j, i] = _integrate(y, g[i] * g[j], False)
    d = np.sqrt(np.diag(G))
    return G / np.outer(d, d)


def max_off_diagonal(G: np.ndarray) -> float:
    if len(G) < 2:
        return 0.0
    return float(np.abs(G - np.diag(np.diag(G))).max())


def norm_drift(
    params: ModelParams,
    profile: PumpProfile,
    spectral: SpectralData,
    spec: SuperpositionSpec,
    grid,
    times: Sequence[float],
) -> tuple[float, list[float]]:
    """max_t |N(t)/N(0) - 1| for the closed form, and the norm curve N(t)."""
    norms = [norm(psi_closed_form(params, profile, spectral, spec, grid, t)) for t in times]
    n0 = norm(psi_closed_form(params, profile, spectral, spec, grid, 0.0))
    return float(max(abs(v / n0 - 1.0) for v in norms)), norms


def tail_fraction(field: WaveField, radius: float) -> float:
    """Share of the norm carried by |x| > radius."""
    total = norm(field)
    mask = field.x > radius
    if mask.sum() < 3:
        return 0.0
    tail = field.with_values(np.where(mask, field.values, 0.0))
    return norm(tail) / total
