"""Positive time-dependent drives u(t) with analytic derivatives.

Every profile kind carries closed forms for u, du/dt, d2u/dt2 and the running
integral of u from 0 to t. Nothing here is differentiated numerically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

KINDS: dict[str, tuple[str, ...]] = {
    "constant": ("u0",),
    "exponential": ("u0", "alpha"),
    "sinusoidal": ("a", "b", "omega"),
    "rational": ("u0", "gamma"),
}


class PumpDomainError(ValueError):
    """Raised when a profile is non-positive (or undefined) somewhere it is used."""


@dataclass(frozen=True)
class PumpSample:
    u: float
    du: float
    ddu: float
    integral: float


@dataclass(frozen=True)
class PumpProfile:
    """A drive u(t) of one of the built-in kinds.

    ``horizon`` is the declared interval [0, T]; ``None`` means unbounded,
    which is only accepted when the profile stays positive for all t >= 0.
    """

    kind: str
    params: Mapping[str, float] = field(default_factory=dict)
    horizon: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown pump kind {self.kind!r}; expected one of {sorted(KINDS)}")
        expected = KINDS[self.kind]
        missing = [p for p in expected if p not in self.params]
        extra = [p for p in self.params if p not in expected]
        if missing or extra:
            raise ValueError(
                f"pump kind {self.kind!r} takes parameters {expected}; "
                f"missing={missing} unexpected={extra}"
            )
        object.__setattr__(self, "params", {p: float(self.params[p]) for p in expected})
        if self.horizon is not None and not self.horizon >= 0:
            raise ValueError(f"horizon must be >= 0, got {self.horizon}")
        # analytic positivity check over the horizon
        self.min_value()

    @classmethod
    def constant(cls, u0: float, horizon: float | None = None) -> "PumpProfile":
        return cls("constant", {"u0": u0}, horizon)

    @classmethod
    def exponential(cls, u0: float, alpha: float, horizon: float | None = None) -> "PumpProfile":
        return cls("exponential", {"u0": u0, "alpha": alpha}, horizon)

    @classmethod
    def sinusoidal(cls, a: float, b: float, omega: float, horizon: float | None = None) -> "PumpProfile":
        return cls("sinusoidal", {"a": a, "b": b, "omega": omega}, horizon)

    @classmethod
    def rational(cls, u0: float, gamma: float, horizon: float | None = None) -> "PumpProfile":
        return cls("rational", {"u0": u0, "gamma": gamma}, horizon)

    def min_value(self) -> float:
        """Analytic lower bound of u on the horizon; raises if it is not positive.

        For the sinusoidal kind the bound is ``a - |b|`` regardless of the horizon.
        """
        p = self.params
        T = self.horizon
        if self.kind == "constant":
            lo = p["u0"]
        elif self.kind == "exponential":
            if p["alpha"] > 0:
                if T is None:
                    raise PumpDomainError("exponential decay needs a finite horizon (u -> 0 as t -> inf)")
                lo = p["u0"] * math.exp(-p["alpha"] * T)
            else:
                lo = p["u0"]
        elif self.kind == "sinusoidal":
            lo = p["a"] - abs(p["b"])
            if lo <= 0:
                raise PumpDomainError(
                    f"sinusoidal pump requires a > |b| (a={p['a']}, b={p['b']})"
                )
        else:
            g = p["gamma"]
            if g >= 0:
                if T is None and g > 0:
                    raise PumpDomainError("rational decay needs a finite horizon (u -> 0 as t -> inf)")
                lo = p["u0"] / (1.0 + g * T) ** 2 if g > 0 else p["u0"]
            else:
                if T is None or T >= -1.0 / g:
                    raise PumpDomainError(
                        f"rational pump with gamma={g} has a pole at t={-1.0 / g}; "
                        f"horizon {T} must stay below it"
                    )
                lo = p["u0"]
        if not lo > 0:
            raise PumpDomainError(f"pump {self.kind} is not positive on the horizon (min {lo})")
        return lo

    def max_value(self) -> float:
        p = self.params
        if self.kind == "constant":
            return p["u0"]
        if self.kind == "exponential":
            if p["alpha"] >= 0:
                return p["u0"]
            if self.horizon is None:
                return math.inf
            return p["u0"] * math.exp(-p["alpha"] * self.horizon)
        if self.kind == "sinusoidal":
            return p["a"] + abs(p["b"])
        g = p["gamma"]
        if g >= 0:
            return p["u0"]
        return p["u0"] / (1.0 + g * self.horizon) ** 2


def eval_pump(profile: PumpProfile, t: float) -> PumpSample:
    """Return u(t), its first two derivatives and the integral of u over [0, t]."""
    if not t >= 0:
        raise PumpDomainError(f"pump evaluated at t={t} < 0")
    T = profile.horizon
    if T is not None and t > T * (1 + 1e-12) + 1e-12:
        raise PumpDomainError(f"t={t} lies beyond the declared horizon T={T}")
    p = profile.params
    kind = profile.kind
    if kind == "constant":
        u0 = p["u0"]
        u, du, ddu, integral = u0, 0.0, 0.0, u0 * t
    elif kind == "exponential":
        u0, al = p["u0"], p["alpha"]
        u = u0 * math.exp(-al * t)
        du = -al * u
        ddu = al * al * u
        integral = -u0 * math.expm1(-al * t) / al if al != 0 else u0 * t
    elif kind == "sinusoidal":
        a, b, w = p["a"], p["b"], p["omega"]
        s, c = math.sin(w * t), math.cos(w * t)
        u = a + b * s
        du = b * w * c
        ddu = -b * w * w * s
        # 1 - cos(wt) = 2 sin^2(wt/2), stable for small wt
        integral = a * t + (2.0 * b * math.sin(0.5 * w * t) ** 2 / w if w != 0 else 0.0)
    else:
        u0, g = p["u0"], p["gamma"]
        q = 1.0 + g * t
        if q <= 0:
            raise PumpDomainError(f"rational pump undefined at t={t} (pole at {-1.0 / g})")
        u = u0 / q**2
        du = -2.0 * g * u0 / q**3
        ddu = 6.0 * g * g * u0 / q**4
        integral = u0 * t / q
    if not u > 0:
        raise PumpDomainError(f"pump {kind} is non-positive at t={t} (u={u})")
    return PumpSample(u, du, ddu, integral)


def pump_term(s: PumpSample) -> float:
    """(3 du^2 - 2 u ddu) / u^4, shared by h(t) and the potential."""
    return (3.0 * s.du * s.du - 2.0 * s.u * s.ddu) / s.u**4


def h_of_t(profile: PumpProfile, t: float, n: int) -> float:
    return pump_term(eval_pump(profile, t)) / 64.0 + n


def gauge_rate(profile: PumpProfile, t: float) -> float:
    """Time rescaling factor 4 u(t) multiplying H0 after the gauge chain."""
    return 4.0 * eval_pump(profile, t).u
