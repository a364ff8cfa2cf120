"""Time-dependent sextic potential and its exact algebraic wavefunctions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import ModelParams, SpectralData
from .pump import PumpProfile, PumpSample, eval_pump, pump_term


class ModelDomainError(ValueError):
    pass


# Named single-coefficient corruptions of the potential, used as negative controls.
# Each maps the nominal (c6, c4, c2, cm2) coefficients to corrupted ones.
MUTATIONS = {
    "harmonic_offset": "4n+3+2k replaced by 4n+4+2k in the x^2 coefficient",
    "quartic_sign": "sign of the 2 beta u^3 x^4 term flipped",
    "drop_pump_term": "(3 du^2 - 2 u ddu)/(16 u^4) dropped from the x^2 coefficient",
    "pump_term_sign": "sign of the (3 du^2 - 2 u ddu)/(16 u^4) term flipped",
    "centrifugal": "k(k-1) replaced by k(k+1)",
}


def potential_coefficients(params: ModelParams, s: PumpSample, mutation: str | None = None):
    """Coefficients (c6, c4, c2, cm2) of V = c6 x^6 + c4 x^4 + c2 x^2 + cm2 / x^2."""
    n, k, beta = params.n, params.k, params.beta
    u = s.u
    offset = 4 * n + 3 + 2 * k
    drive = pump_term(s) / 16.0
    c4 = 2.0 * beta * u**3
    cm2 = k * (k - 1.0)
    if mutation is None:
        pass
    elif mutation == "harmonic_offset":
        offset += 1
    elif mutation == "quartic_sign":
        c4 = -c4
    elif mutation == "drop_pump_term":
        drive = 0.0
    elif mutation == "pump_term_sign":
        drive = -drive
    elif mutation == "centrifugal":
        cm2 = k * (k + 1.0)
    else:
        raise ValueError(f"unknown mutation {mutation!r}; known: {sorted(MUTATIONS)}")
    c2 = (beta**2 - offset - drive) * u**2
    return u**4, c4, c2, cm2


def potential(params: ModelParams, profile: PumpProfile, x, t: float, mutation: str | None = None):
    x = np.asarray(x, dtype=float)
    c6, c4, c2, cm2 = potential_coefficients(params, eval_pump(profile, t), mutation)
    x2 = x * x
    v = ((c6 * x2 + c4) * x2 + c2) * x2
    if cm2 != 0.0:
        if np.any(x2 == 0):
            raise ModelDomainError("potential evaluated at x=0 with a non-zero centrifugal term")
        v = v + cm2 / x2
    return v


def _check_x(params: ModelParams, x: np.ndarray, allow_zero: bool):
    if params.k == 0:
        return
    bad = x < 0 if allow_zero else x <= 0
    if np.any(bad):
        raise ModelDomainError(f"x must be {'>= 0' if allow_zero else '> 0'} when k={params.k} (half-line model)")


def sigma(params: ModelParams, profile: PumpProfile, x, t: float):
    """Exponent -u^2 x^4/4 - beta u x^2/2 + k log x of the non-unitary gauge factor."""
    x = np.asarray(x, dtype=float)
    _check_x(params, x, allow_zero=False)
    u = eval_pump(profile, t).u
    x2 = x * x
    out = -0.25 * u * u * x2 * x2 - 0.5 * params.beta * u * x2
    if params.k != 0:
        out = out + params.k * np.log(x)
    return out


def _envelope(k: float, beta: float, u: float, x: np.ndarray):
    x2 = x * x
    e = np.exp(-0.25 * u * u * x2 * x2 - 0.5 * beta * u * x2)
    return e if k == 0 else np.power(x, k) * e


def mod_prefactor(params: ModelParams, profile: PumpProfile, x, t: float):
    """exp(sigma) evaluated as x^k exp(...) so that x -> 0 needs no logarithm."""
    x = np.asarray(x, dtype=float)
    _check_x(params, x, allow_zero=True)
    return _envelope(params.k, params.beta, eval_pump(profile, t).u, x)


def truncation_radius(profile: PumpProfile) -> float:
    """Radius beyond which the quartic envelope is below e^-40 for every t on the horizon."""
    u_min = profile.min_value()
    return (160.0 / u_min**2) ** 0.25 + 2.0


@dataclass(frozen=True)
class SuperpositionSpec:
    terms: tuple[tuple[int, complex], ...]

    def __post_init__(self):
        terms = tuple((int(j), complex(c)) for j, c in self.terms)
        if not terms:
            raise ValueError("superposition needs at least one term")
        idx = [j for j, _ in terms]
        if len(set(idx)) != len(idx):
            raise ValueError(f"mode indices must be distinct, got {idx}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def single(cls, j: int = 0, weight: complex = 1.0) -> "SuperpositionSpec":
        return cls(((j, weight),))

    @classmethod
    def equal(cls, modes: Sequence[int]) -> "SuperpositionSpec":
        w = 1.0 / np.sqrt(len(modes))
        return cls(tuple((j, w) for j in modes))

    def validate(self, n: int):
        for j, _ in self.terms:
            if not 0 <= j <= n:
                raise ValueError(f"mode index {j} outside 0..{n}")


@dataclass
class WaveField:
    """Samples of psi on a uniform grid at time t.

    ``whole_line`` marks an even function stored on [0, x_max] only; integrals
    then cover the mirrored half as well.
    """

    x: np.ndarray
    values: np.ndarray
    t: float = 0.0
    whole_line: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.x.ndim != 1 or self.x.shape != self.values.shape:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if self.x.size > 1 and not np.all(np.diff(self.x) > 0):
            raise ValueError("grid must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("wave field contains NaN or Inf")
        if self.whole_line and self.x[0] != 0.0:
            raise ValueError("whole_line fields must start at x=0")

    def with_values(self, values) -> "WaveField":
        return WaveField(self.x, values, self.t, self.whole_line, dict(self.meta))


def psi_closed_form(
    params: ModelParams,
    profile: PumpProfile,
    spectral: SpectralData,
    spec: SuperpositionSpec,
    grid,
    t: float,
) -> WaveField:
    """Exact solution psi(x, t) for the requested superposition of algebraic modes.

    Each mode contributes
        u^((2k+1)/4) e^sigma phi_j(sqrt(u) x) exp(-i du/(8u) x^2 - 4 i lambda_j int_0^t u)
    """
    spec.validate(params.n)
    x = np.asarray(grid, dtype=float)
    _check_x(params, x, allow_zero=True)
    s = eval_pump(profile, t)
    u = s.u
    env = _envelope(params.k, params.beta, u, x) * u ** ((2 * params.k + 1) / 4.0)
    chirp = -(s.du / (8.0 * u)) * x * x
    y = np.sqrt(u) * x
    psi = np.zeros(x.shape, dtype=complex)
    for j, c in spec.terms:
        lam = spectral.eigenvalues[j]
        amp = env * spectral.eigenvectors[j](y)
        psi += c * amp * np.exp(1j * (chirp - 4.0 * lam * s.integral))
    whole = params.k == 0 and x.size > 0 and x[0] == 0.0
    return WaveField(x, psi, t, whole, {"params": params.as_dict()})


def closed_form_sampler(params: ModelParams, profile: PumpProfile, spectral: SpectralData, spec: SuperpositionSpec):
    """Callable (x, t) -> psi values, for feeding the residual checker."""

    def sample(x, t):
        return psi_closed_form(params, profile, spectral, spec, x, t).values

    return sample
