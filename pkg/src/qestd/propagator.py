"""Crank-Nicolson propagation and finite-difference stationary spectra.

Boundary handling on a uniform grid x_0 < ... < x_{N-1}:

* ``dirichlet-both``: psi vanishes at the virtual nodes x_0 - dx and
  x_{N-1} + dx. Half-line runs put x_0 = dx so the left node sits at x = 0.
* ``even-reflect``: x_0 = 0 with ghost psi_{-1} = psi_1 (even functions);
  Dirichlet at x_{N-1} + dx.

The even-reflect Laplacian is self-adjoint for the trapezoid weight
(1/2 at x = 0), so that weight defines the conserved discrete norm.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import ModelParams, TridiagonalMatrix, symmetrized
from .linalg import solve_tridiagonal, symmetric_tridiagonal_eig
from .model import WaveField, potential, truncation_radius
from .pump import PumpProfile

BOUNDARY_MODES = ("dirichlet-both", "even-reflect")
MAX_DENSE_POINTS = 8001

PotentialFn = Callable[[np.ndarray, float], np.ndarray]


class PropagationConfigError(ValueError):
    pass


class FDConfinementError(RuntimeError):
    pass


@dataclass(frozen=True)
class PropagationConfig:
    x_min: float
    x_max: float
    n_points: int
    t0: float
    t1: float
    steps: int
    boundary: str = "even-reflect"

    def __post_init__(self):
        if self.n_points < 201:
            raise PropagationConfigError(f"need N >= 201 grid points, got {self.n_points}")
        if self.steps < 100:
            raise PropagationConfigError(f"need M >= 100 time steps, got {self.steps}")
        if self.boundary not in BOUNDARY_MODES:
            raise PropagationConfigError(f"boundary must be one of {BOUNDARY_MODES}")
        if self.boundary == "even-reflect" and self.x_min != 0.0:
            raise PropagationConfigError("even-reflect needs x_min = 0")
        if not self.x_max > self.x_min:
            raise PropagationConfigError("x_max must exceed x_min")
        if not self.t1 > self.t0:
            raise PropagationConfigError("t1 must exceed t0")

    @classmethod
    def for_model(cls, params: ModelParams, profile: PumpProfile, n_points: int, t1: float,
                  steps: int, x_max: float | None = None, t0: float = 0.0) -> "PropagationConfig":
        """Standard layout: even-reflect on [0, x_max] for k = 0, else Dirichlet on [dx, x_max]."""
        x_max = truncation_radius(profile) if x_max is None else x_max
        if params.k == 0:
            return cls(0.0, x_max, n_points, t0, t1, steps, "even-reflect")
        dx = x_max / n_points
        return cls(dx, x_max, n_points, t0, t1, steps, "dirichlet-both")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / self.steps


def boundary_for_grid(x: np.ndarray) -> str:
    return "even-reflect" if x[0] == 0.0 else "dirichlet-both"


def kinetic_bands(n_points: int, dx: float, boundary: str):
    """Bands (lower, diag, upper) of -d^2/dx^2 with the given boundary treatment."""
    c = 1.0 / (dx * dx)
    diag = np.full(n_points, 2.0 * c)
    upper = np.full(n_points - 1, -c)
    lower = np.full(n_points - 1, -c)
    if boundary == "even-reflect":
        upper[0] = -2.0 * c
    return lower, diag, upper


def discrete_weights(n_points: int, boundary: str) -> np.ndarray:
    w = np.ones(n_points)
    if boundary == "even-reflect":
        w[0] = 0.5
    return w


def discrete_norm(values: np.ndarray, dx: float, boundary: str) -> float:
    """Weighted sum dx * sum w_i |psi_i|^2 conserved exactly by the CN scheme."""
    return float(dx * np.sum(discrete_weights(values.size, boundary) * np.abs(values) ** 2))


def _family_potential(params: ModelParams, profile: PumpProfile) -> PotentialFn:
    return lambda x, t: potential(params, profile, x, t)


def propagate_trajectory(
    initial: WaveField,
    params: ModelParams,
    profile: PumpProfile,
    cfg: PropagationConfig,
    checkpoints: int = 1,
    potential_fn: PotentialFn | None = None,
) -> list[WaveField]:
    """Crank-Nicolson evolution from cfg.t0 to cfg.t1.

    Returns the initial field followed by ``checkpoints`` evenly spaced snapshots
    (the last one at t1). V is sampled at each step's midpoint time.
    """
    x = cfg.grid
    if initial.x.shape != x.shape or not np.allclose(initial.x, x, rtol=0, atol=1e-12 * cfg.x_max):
        raise PropagationConfigError("initial field is not on the configured grid")
    if potential_fn is None:
        if params.k != 0 and cfg.boundary == "even-reflect":
            raise PropagationConfigError("even-reflect boundary is only valid for k = 0")
        r = truncation_radius(profile)
        if cfg.x_max < r * (1 - 1e-12):
            raise PropagationConfigError(f"x_max={cfg.x_max} is inside the truncation radius {r:.6g}")
        potential_fn = _family_potential(params, profile)
    if cfg.steps % checkpoints:
        raise PropagationConfigError("steps must be a multiple of the checkpoint count")

    dt, dx = cfg.dt, cfg.dx
    k_low, k_diag, k_up = kinetic_bands(x.size, dx, cfg.boundary)
    half = 0.5j * dt
    a_low, a_up = half * k_low, half * k_up
    psi = initial.values.astype(complex).copy()
    whole = cfg.boundary == "even-reflect"
    out = [WaveField(x, psi.copy(), cfg.t0, whole)]
    every = cfg.steps // checkpoints
    for m in range(cfg.steps):
        t_mid = cfg.t0 + (m + 0.5) * dt
        diag = k_diag + potential_fn(x, t_mid)
        # rhs = (I - i dt/2 H) psi
        hpsi = diag * psi
        hpsi[:-1] += k_up * psi[1:]
        hpsi[1:] += k_low * psi[:-1]
        rhs = psi - half * hpsi
        psi = solve_tridiagonal(a_low, 1.0 + half * diag, a_up, rhs)
        if (m + 1) % every == 0:
            out.append(WaveField(x, psi.copy(), cfg.t0 + (m + 1) * dt, whole))
    return out


def propagate(
    initial: WaveField,
    params: ModelParams,
    profile: PumpProfile,
    cfg: PropagationConfig,
    potential_fn: PotentialFn | None = None,
) -> WaveField:
    return propagate_trajectory(initial, params, profile, cfg, 1, potential_fn)[-1]


def fidelity(a: WaveField, b: WaveField) -> float:
    """|<a, b>|^2 / (<a, a> <b, b>)."""
    from .verify import inner, norm

    na, nb = norm(a), norm(b)
    if na == 0 or nb == 0:
        raise ValueError("fidelity undefined for a zero-norm field")
    return abs(inner(a, b)) ** 2 / (na * nb)


def fd_hamiltonian(x: np.ndarray, v: np.ndarray, boundary: str | None = None) -> TridiagonalMatrix:
    """-d^2/dx^2 + V as a (possibly non-symmetric) tridiagonal matrix."""
    boundary = boundary or boundary_for_grid(x)
    dx = (x[-1] - x[0]) / (x.size - 1)
    low, diag, up = kinetic_bands(x.size, dx, boundary)
    return TridiagonalMatrix(diag + v, up, low)


def stationary_eigs_fd(
    params: ModelParams | None,
    u_const: float,
    grid,
    count: int,
    potential_fn: Callable[[np.ndarray], np.ndarray] | None = None,
) -> np.ndarray:
    """Lowest ``count`` eigenvalues of the FD Hamiltonian for a constant pump.

    A grid starting at 0 is treated as even-reflect (even states only); any
    other grid uses Dirichlet ends, so a symmetric grid gives the full spectrum.
    """
    x = np.asarray(grid, dtype=float)
    if x.size > MAX_DENSE_POINTS:
        raise PropagationConfigError(f"grid of {x.size} points exceeds the cap of {MAX_DENSE_POINTS}")
    if potential_fn is None:
        profile = PumpProfile.constant(u_const)
        if params.k != 0 and x[0] <= 0:
            raise PropagationConfigError("half-line model needs a grid starting at x > 0")
        v = potential(params, profile, x, 0.0)
    else:
        v = np.asarray(potential_fn(x), dtype=float)
    H = fd_hamiltonian(x, v)
    d, off = symmetrized(H)
    w, _ = symmetric_tridiagonal_eig(d, off, vectors=False)
    if count > w.size:
        raise FDConfinementError(f"asked for {count} states from a {w.size}-point grid")
    low = w[:count]
    # the requested states must be classically forbidden at the outer edge
    edge = v[-1] if x[0] >= 0 else min(v[0], v[-1])
    if low[-1] >= edge:
        raise FDConfinementError(
            f"state {count - 1} (E={low[-1]:.6g}) is not confined: V at the boundary is {edge:.6g}"
        )
    return low


def nearest(values: Sequence[float], targets: Sequence[float]) -> np.ndarray:
    """For each target, distance to the closest entry in ``values``."""
    v = np.asarray(values)
    return np.array([np.abs(v - t).min() for t in targets])
