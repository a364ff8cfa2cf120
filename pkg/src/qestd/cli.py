"""Command line entry point: ``qestd spectrum|wave|verify|propagate --config FILE``."""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import io
from .algebra import build_h0_matrix, eigen_residual, eigensolve, symmetric_gram
from .config import ConfigError, RunConfig, load_config
from .linalg import ConvergenceError, SingularPivotError
from .model import (
    MUTATIONS,
    ModelDomainError,
    SuperpositionSpec,
    WaveField,
    closed_form_sampler,
    psi_closed_form,
    truncation_radius,
)
from .propagator import (
    FDConfinementError,
    PropagationConfig,
    PropagationConfigError,
    discrete_norm,
    fidelity,
    propagate_trajectory,
)
from .pump import PumpDomainError, eval_pump, h_of_t
from .verify import (
    VerificationConfigError,
    convergence_slopes,
    max_off_diagonal,
    norm_drift,
    orthogonality_matrix,
    pde_residual,
    refinement_ladder,
    tail_fraction,
    uniform_grid,
)

log = logging.getLogger("qestd")

EXIT_OK, EXIT_TOLERANCE, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

CONFIG_ERRORS = (
    ConfigError,
    PumpDomainError,
    ModelDomainError,
    PropagationConfigError,
    VerificationConfigError,
)
NUMERIC_ERRORS = (ConvergenceError, SingularPivotError, FDConfinementError, AssertionError)


def _x_max(cfg: RunConfig) -> float:
    return cfg.x_max if cfg.x_max is not None else truncation_radius(cfg.pump)


def _grid(cfg: RunConfig) -> np.ndarray:
    return np.linspace(0.0, _x_max(cfg), cfg.n_points)


def _check(value: float, limit: float, mode: str = "max") -> dict:
    ok = value <= limit if mode == "max" else value >= limit
    return {"value": value, "limit": limit, "mode": mode, "passed": bool(ok)}


def _spectral(cfg: RunConfig):
    m = build_h0_matrix(cfg.params)
    s = eigensolve(m, cfg.params)
    return m, s


def cmd_spectrum(cfg: RunConfig, args) -> int:
    m, s = _spectral(cfg)
    res = eigen_residual(m, s)
    gram = max_off_diagonal(symmetric_gram(m, s))
    checks = {
        "eigen_residual": _check(res, cfg.tolerances["eigen_residual"]),
        "discrete_gram": _check(gram, cfg.tolerances["discrete_gram"]),
    }
    out = {"provenance": cfg.provenance(), **s.as_dict(), "checks": checks}
    path = io.write_json(cfg.out_dir / "spectrum.json", out)
    log.info("wrote %s", path)
    return EXIT_OK if all(c["passed"] for c in checks.values()) else EXIT_TOLERANCE


def cmd_wave(cfg: RunConfig, args) -> int:
    times = args.times if args.times is not None else cfg.wave_times
    _, s = _spectral(cfg)
    grid = _grid(cfg)
    for t in times:
        field = psi_closed_form(cfg.params, cfg.pump, s, cfg.superposition, grid, t)
        path = io.write_wave_csv(cfg.out_dir / f"wave_t{float(t)!r}.csv", field)
        log.info("wrote %s", path)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    p, pump, tol, r = cfg.params, cfg.pump, cfg.tolerances, cfg.residual
    m, s = _spectral(cfg)
    x_max = _x_max(cfg)
    sampler = closed_form_sampler(p, pump, s, cfg.superposition)
    mutation = args.mutate

    point = pde_residual(sampler, p, pump, uniform_grid(r["x_min"], x_max, r["dx"]), r["t"], r["dtau"], mutation)
    ladder = refinement_ladder(
        sampler, p, pump, r["t"], r["x_min"], x_max, r["ladder_dx0"], r["levels"], r["dtau_ratio"],
        mutation=mutation, jobs=args.jobs,
    )
    io.write_rows_csv(
        cfg.out_dir / "residual_ladder.csv",
        ("dx", "dtau", "residual"),
        [(rep.dx, rep.dtau, rep.max_rel_residual) for rep in ladder],
    )
    above_floor = [rep for rep in ladder if rep.max_rel_residual > tol["floor"]]
    slope, pair = convergence_slopes(above_floor) if len(above_floor) >= 2 else (float("nan"), [])
    checks: dict[str, dict] = {
        "residual": _check(point.max_rel_residual, tol["residual"]),
        "slope": {
            **_check(slope if np.isfinite(slope) else -1.0, tol["slope"], "min"),
            "pairwise": pair,
            "levels_used": len(above_floor),
        },
    }
    if mutation is not None:
        plateau = min(rep.max_rel_residual for rep in ladder)
        checks["mutation_plateau"] = {"mutation": mutation, "plateau": plateau, "floor": tol["mutation_plateau"]}

    grid = _grid(cfg)
    times = list(np.linspace(0.0, pump.horizon, cfg.verify["n_times"] + 1)[1:])
    drifts = {}
    specs = {"superposition": cfg.superposition}
    specs.update({f"mode_{j}": SuperpositionSpec.single(j) for j in range(p.n + 1)})
    for name, spec in specs.items():
        drift, curve = norm_drift(p, pump, s, spec, grid, times)
        drifts[name] = {**_check(drift, tol["norm_drift"]), "norms": curve}
    checks["norm_drift"] = {"passed": all(d["passed"] for d in drifts.values()), "cases": drifts}
    checks["orthogonality"] = _check(max_off_diagonal(orthogonality_matrix(p, s, grid)), tol["orthogonality"])
    checks["discrete_gram"] = _check(max_off_diagonal(symmetric_gram(m, s)), tol["discrete_gram"])
    wide = np.linspace(0.0, x_max + 2.0, int(cfg.n_points * (x_max + 2.0) / x_max) | 1)
    tail = max(
        tail_fraction(psi_closed_form(p, pump, s, cfg.superposition, wide, t), x_max) for t in [0.0] + times
    )
    checks["tail"] = _check(tail, tol["tail"])

    provenance = cfg.provenance()
    provenance["h"] = {repr(float(t)): h_of_t(pump, t, p.n) for t in (0.0, r["t"], pump.horizon)}
    provenance["u_min"] = pump.min_value()
    provenance["x_max"] = x_max
    passed = all(c.get("passed", False) for c in checks.values())
    out = {
        "provenance": provenance,
        "residual_point": point.as_dict(),
        "ladder": [rep.as_dict() for rep in ladder],
        "checks": checks,
        "passed": passed,
    }
    io.write_json(cfg.out_dir / "conservation.json", out)
    for name, c in checks.items():
        log.info("%-16s %s", name, "PASS" if c.get("passed") else "FAIL")
    return EXIT_OK if passed else EXIT_TOLERANCE


def cmd_propagate(cfg: RunConfig, args) -> int:
    p, pump, tol, pr = cfg.params, cfg.pump, cfg.tolerances, cfg.propagate
    pcfg = PropagationConfig.for_model(p, pump, cfg.n_points, pr["t1"], pr["steps"], cfg.x_max)
    x = pcfg.grid
    out: dict = {"provenance": cfg.provenance()}
    if pr["free"]:
        centre = 0.0 if pcfg.boundary == "even-reflect" else 0.5 * (pcfg.x_min + pcfg.x_max)
        init = WaveField(x, np.exp(-((x - centre) ** 2)), 0.0, pcfg.boundary == "even-reflect")
        traj = propagate_trajectory(init, p, pump, pcfg, pr["checkpoints"], lambda xx, t: np.zeros_like(xx))
        fid = None
    else:
        _, s = _spectral(cfg)
        init = psi_closed_form(p, pump, s, cfg.superposition, x, pcfg.t0)
        traj = propagate_trajectory(init, p, pump, pcfg, pr["checkpoints"])
        fid = [fidelity(f, psi_closed_form(p, pump, s, cfg.superposition, x, f.t)) for f in traj]
    n0 = discrete_norm(traj[0].values, pcfg.dx, pcfg.boundary)
    norms = [discrete_norm(f.values, pcfg.dx, pcfg.boundary) for f in traj]
    drift = max(abs(v / n0 - 1.0) for v in norms)
    for i, f in enumerate(traj[1:], 1):
        io.write_wave_csv(cfg.out_dir / f"checkpoint_{i}_t{float(f.t)!r}.csv", f, p.as_dict())
    checks = {"discrete_norm": _check(drift, tol["free_norm"] if pr["free"] else tol["discrete_norm"])}
    if fid is not None:
        checks["fidelity"] = _check(min(fid), tol["fidelity"], "min")
    out.update(
        {
            "grid": {"x_min": pcfg.x_min, "x_max": pcfg.x_max, "n_points": pcfg.n_points, "boundary": pcfg.boundary},
            "times": [f.t for f in traj],
            "fidelity": fid,
            "norm": norms,
            "checks": checks,
        }
    )
    passed = all(c["passed"] for c in checks.values())
    out["passed"] = passed
    io.write_json(cfg.out_dir / "fidelity.json", out)
    return EXIT_OK if passed else EXIT_TOLERANCE


COMMANDS = {"spectrum": cmd_spectrum, "wave": cmd_wave, "verify": cmd_verify, "propagate": cmd_propagate}


def _times(s: str) -> list[float]:
    return [float(v) for v in s.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qestd", description=__doc__)
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="flat key = value run configuration")
    ap.add_argument("--out", help="output directory (overrides output.dir)")
    ap.add_argument("--jobs", type=int, default=1, help="parallel refinement-ladder levels")
    ap.add_argument("--mutate", choices=sorted(MUTATIONS), help="corrupt the potential (verify only)")
    ap.add_argument("--times", type=_times, help="comma-separated times for 'wave'")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.mutate and args.command != "verify":
        print("error: --mutate is only accepted by 'verify'", file=sys.stderr)
        return EXIT_CONFIG
    try:
        overrides = {"output.dir": args.out} if args.out else None
        cfg = load_config(args.config, overrides)
        if args.times is not None:
            for t in args.times:
                eval_pump(cfg.pump, t)
        return COMMANDS[args.command](cfg, args)
    except CONFIG_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
