"""Flat ``section.key = value`` run configuration with field-path validation."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .algebra import ModelParams
from .model import SuperpositionSpec
from .pump import KINDS, PumpDomainError, PumpProfile

DEFAULT_TOLERANCES: dict[str, float] = {
    "eigen_residual": 1e-12,
    "residual": 1e-6,
    "slope": 3.0,
    "floor": 1e-9,
    "norm_drift": 1e-8,
    "orthogonality": 1e-8,
    "discrete_gram": 1e-10,
    "tail": 1e-12,
    "fidelity": 0.999,
    "discrete_norm": 1e-10,
    "free_norm": 1e-12,
    "mutation_plateau": 1e-4,
}


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _float(s: str) -> float:
    return float(s)


def _int(s: str) -> int:
    v = float(s)
    if v != int(v):
        raise ValueError(f"{s!r} is not an integer")
    return int(v)


def _bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{s!r} is not a boolean")


def _floats(s: str) -> list[float]:
    return [float(p) for p in s.split(",") if p.strip()]


def _ints(s: str) -> list[int]:
    return [_int(p) for p in s.split(",") if p.strip()]


def _complexes(s: str) -> list[complex]:
    return [complex(p.strip().replace(" ", "")) for p in s.split(",") if p.strip()]


# key -> (parser, default); a default of ... marks a required key
SCHEMA: dict[str, tuple[Callable[[str], Any], Any]] = {
    "params.n": (_int, ...),
    "params.k": (_float, 0.0),
    "params.beta": (_float, 0.0),
    "pump.kind": (str, ...),
    "pump.horizon": (_float, 1.0),
    "grid.n_points": (_int, 4001),
    "grid.x_max": (_float, None),
    "superposition.modes": (_ints, [0]),
    "superposition.weights": (_complexes, None),
    "output.dir": (str, "out"),
    "wave.times": (_floats, [0.0]),
    "residual.t": (_float, None),
    "residual.dx": (_float, 1e-3),
    "residual.dtau": (_float, 1e-4),
    "residual.ladder_dx0": (_float, 0.02),
    "residual.levels": (_int, 3),
    "residual.dtau_ratio": (_float, 0.1),
    "residual.x_min": (_float, None),
    "verify.n_times": (_int, 10),
    "propagate.steps": (_int, 8000),
    "propagate.t1": (_float, None),
    "propagate.checkpoints": (_int, 4),
    "propagate.free": (_bool, False),
}
SCHEMA.update({f"pump.{p}": (_float, None) for ps in KINDS.values() for p in ps})
SCHEMA.update({f"tol.{name}": (_float, v) for name, v in DEFAULT_TOLERANCES.items()})


@dataclass
class RunConfig:
    params: ModelParams
    pump: PumpProfile
    superposition: SuperpositionSpec
    n_points: int
    x_max: float | None
    out_dir: Path
    wave_times: list[float]
    residual: dict[str, Any]
    verify: dict[str, Any]
    propagate: dict[str, Any]
    tolerances: dict[str, float]
    resolved: dict[str, Any] = field(default_factory=dict)

    def provenance(self) -> dict[str, Any]:
        return {"config": self.resolved, "tolerances": dict(self.tolerances)}


def parse_text(text: str) -> dict[str, str]:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in raw:
            raise ConfigError(key, f"duplicate key (line {lineno})")
        raw[key] = value
    return raw


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, list):
        return [_jsonable(i) for i in v]
    return v


def build_config(raw: dict[str, str], overrides: dict[str, str] | None = None) -> RunConfig:
    raw = dict(raw)
    raw.update(overrides or {})
    for key in raw:
        if key not in SCHEMA:
            raise ConfigError(key, "unknown key")
    vals: dict[str, Any] = {}
    for key, (parse, default) in SCHEMA.items():
        if key in raw:
            try:
                vals[key] = parse(raw[key])
            except ValueError as exc:
                raise ConfigError(key, str(exc)) from None
        elif default is ...:
            raise ConfigError(key, "required key is missing")
        else:
            vals[key] = default

    n, k, beta = vals["params.n"], vals["params.k"], vals["params.beta"]
    if n < 0:
        raise ConfigError("params.n", f"must be a non-negative integer, got {n}")
    if not k >= 0:
        raise ConfigError("params.k", f"must be >= 0, got {k}")
    params = ModelParams(n, k, beta)

    kind = vals["pump.kind"]
    if kind not in KINDS:
        raise ConfigError("pump.kind", f"unknown kind {kind!r}; expected one of {sorted(KINDS)}")
    pump_params = {}
    for name in KINDS[kind]:
        if vals[f"pump.{name}"] is None:
            raise ConfigError(f"pump.{name}", f"required for pump kind {kind!r}")
        pump_params[name] = vals[f"pump.{name}"]
    for key in raw:
        if key.startswith("pump.") and key[5:] not in KINDS[kind] and key not in ("pump.kind", "pump.horizon"):
            raise ConfigError(key, f"not a parameter of pump kind {kind!r}")
    horizon = vals["pump.horizon"]
    if not horizon > 0:
        raise ConfigError("pump.horizon", "must be > 0")
    try:
        pump = PumpProfile(kind, pump_params, horizon)
    except PumpDomainError as exc:
        raise ConfigError("pump", str(exc)) from None

    modes = vals["superposition.modes"]
    weights = vals["superposition.weights"]
    if weights is None:
        weights = [1.0] * len(modes)
    if len(weights) != len(modes):
        raise ConfigError("superposition.weights", f"{len(weights)} weights for {len(modes)} modes")
    try:
        spec = SuperpositionSpec(tuple(zip(modes, weights)))
        spec.validate(n)
    except ValueError as exc:
        raise ConfigError("superposition.modes", str(exc)) from None

    if vals["grid.n_points"] < 5:
        raise ConfigError("grid.n_points", "need at least 5 points")
    if vals["grid.x_max"] is not None and not vals["grid.x_max"] > 0:
        raise ConfigError("grid.x_max", "must be > 0")
    for t in vals["wave.times"]:
        if t < 0 or t > horizon:
            raise ConfigError("wave.times", f"time {t} outside the horizon [0, {horizon}]")

    residual = {
        "t": vals["residual.t"] if vals["residual.t"] is not None else 0.5 * horizon,
        "dx": vals["residual.dx"],
        "dtau": vals["residual.dtau"],
        "ladder_dx0": vals["residual.ladder_dx0"],
        "levels": vals["residual.levels"],
        "dtau_ratio": vals["residual.dtau_ratio"],
        "x_min": vals["residual.x_min"] if vals["residual.x_min"] is not None else (0.2 if k > 0 else 0.0),
    }
    for name in ("dx", "dtau", "ladder_dx0", "dtau_ratio"):
        if not residual[name] > 0:
            raise ConfigError(f"residual.{name}", "must be > 0")
    if residual["levels"] < 2:
        raise ConfigError("residual.levels", "need at least 2 levels for a slope")
    if not 0 <= residual["t"] <= horizon:
        raise ConfigError("residual.t", f"outside the horizon [0, {horizon}]")
    if k > 0 and not residual["x_min"] > 0:
        raise ConfigError("residual.x_min", "must be > 0 for a half-line model (k > 0)")

    propagate = {
        "steps": vals["propagate.steps"],
        "t1": vals["propagate.t1"] if vals["propagate.t1"] is not None else horizon,
        "checkpoints": vals["propagate.checkpoints"],
        "free": vals["propagate.free"],
    }
    if not 0 < propagate["t1"] <= horizon:
        raise ConfigError("propagate.t1", f"must lie in (0, {horizon}]")
    if propagate["checkpoints"] < 1 or propagate["steps"] % propagate["checkpoints"]:
        raise ConfigError("propagate.checkpoints", "must be >= 1 and divide propagate.steps")

    verify = {"n_times": vals["verify.n_times"]}
    if verify["n_times"] < 1:
        raise ConfigError("verify.n_times", "must be >= 1")

    tolerances = {name: vals[f"tol.{name}"] for name in DEFAULT_TOLERANCES}
    resolved = {key: _jsonable(v) for key, v in vals.items() if v is not None}
    resolved["superposition.weights"] = _jsonable(list(weights))
    resolved["residual.t"] = residual["t"]
    resolved["residual.x_min"] = residual["x_min"]
    resolved["propagate.t1"] = propagate["t1"]
    return RunConfig(
        params=params,
        pump=pump,
        superposition=spec,
        n_points=vals["grid.n_points"],
        x_max=vals["grid.x_max"],
        out_dir=Path(vals["output.dir"]),
        wave_times=vals["wave.times"],
        residual=residual,
        verify=verify,
        propagate=propagate,
        tolerances=tolerances,
        resolved=resolved,
    )


def load_config(path: str | Path, overrides: dict[str, str] | None = None) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("--config", str(exc)) from None
    return build_config(parse_text(text), overrides)

