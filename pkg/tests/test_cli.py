import json

import numpy as np
import pytest

from qestd.algebra import ModelParams, spectrum
from qestd.cli import main
from qestd.config import ConfigError, build_config, parse_text
from qestd.io import read_wave_csv
from qestd.pump import PumpProfile, eval_pump

BASE = """
params.n = {n}
params.k = {k}
params.beta = {beta}
pump.kind = {kind}
{pump}
pump.horizon = 1
grid.n_points = 2001
residual.ladder_dx0 = 0.04
propagate.steps = 1000
"""


def write_cfg(tmp_path, n=2, k=0, beta=0, kind="constant", pump="pump.u0 = 1", extra=""):
    path = tmp_path / "run.cfg"
    path.write_text(BASE.format(n=n, k=k, beta=beta, kind=kind, pump=pump) + extra)
    return path


def run(cfg, cmd, out, *extra):
    return main([cmd, "--config", str(cfg), "--out", str(out), *extra])


def test_spectrum_n2(tmp_path):
    cfg = write_cfg(tmp_path)
    assert run(cfg, "spectrum", tmp_path / "o") == 0
    d = json.loads((tmp_path / "o" / "spectrum.json").read_text())
    assert np.allclose(d["eigenvalues"], [-2, 0, 2], atol=1e-12)
    assert d["provenance"]["config"]["params.n"] == 2
    assert "tolerances" in d["provenance"]


def test_spectrum_n0(tmp_path):
    cfg = write_cfg(tmp_path, n=0, k=1.5, beta=0.8)
    assert run(cfg, "spectrum", tmp_path / "o") == 0
    d = json.loads((tmp_path / "o" / "spectrum.json").read_text())
    assert d["eigenvalues"] == [pytest.approx(0.8 * 4 / 4)]


def test_negative_k_is_config_error(tmp_path, capsys):
    cfg = write_cfg(tmp_path, k=-1)
    assert run(cfg, "spectrum", tmp_path / "o") == 2
    assert "params.k" in capsys.readouterr().err


def test_unknown_and_missing_keys():
    with pytest.raises(ConfigError, match="params.m"):
        build_config(parse_text("params.m = 1\npump.kind = constant\npump.u0 = 1"))
    with pytest.raises(ConfigError, match="params.n"):
        build_config(parse_text("pump.kind = constant\npump.u0 = 1"))
    with pytest.raises(ConfigError, match="pump.u0"):
        build_config(parse_text("params.n = 1\npump.kind = constant"))
    with pytest.raises(ConfigError, match="pump.alpha"):
        build_config(parse_text("params.n = 1\npump.kind = constant\npump.u0 = 1\npump.alpha = 2"))
    with pytest.raises(ConfigError, match="superposition.weights"):
        build_config(parse_text("params.n = 1\npump.kind = constant\npump.u0 = 1\nsuperposition.modes = 0, 1\nsuperposition.weights = 1"))
    with pytest.raises(ConfigError, match="duplicate"):
        parse_text("a = 1\na = 2")


def test_wave_t0_matches_formula(tmp_path):
    cfg = write_cfg(tmp_path, n=2, k=1.5, beta=0.7, kind="exponential", pump="pump.u0 = 1\npump.alpha = 0")
    assert run(cfg, "wave", tmp_path / "o", "--times", "0") == 0
    f = read_wave_csv(tmp_path / "o" / "wave_t0.0.csv")
    s = spectrum(ModelParams(2, 1.5, 0.7))
    x = f.x
    ref = x**1.5 * np.exp(-(x**4) / 4 - 0.35 * x**2) * s.eigenvectors[0](x)
    # exp of arguments near -200 carries ~1e-13 relative rounding
    assert np.allclose(f.values, ref, rtol=1e-12, atol=1e-300)
    header = (tmp_path / "o" / "wave_t0.0.csv").read_text().splitlines()[:2]
    assert header[0].startswith("# t=0.0") and "beta=0.7" in header[0]
    assert header[1] == "x,re,im,abs2"


def test_wave_scaling_between_times(tmp_path):
    cfg = write_cfg(tmp_path, n=2, k=1.5, beta=0.7, kind="sinusoidal", pump="pump.a = 1\npump.b = 0.3\npump.omega = 2")
    assert run(cfg, "wave", tmp_path / "o", "--times", "0.25,0.75") == 0
    prof = PumpProfile.sinusoidal(1, 0.3, 2)
    fa = read_wave_csv(tmp_path / "o" / "wave_t0.25.csv")
    fb = read_wave_csv(tmp_path / "o" / "wave_t0.75.csv")
    ua, ub = eval_pump(prof, 0.25).u, eval_pump(prof, 0.75).u
    # |psi(x,t)| = u^(1/4) g(sqrt(u) x): map field a onto field b through g
    g = np.abs(fa.values) / ua**0.25
    y = np.sqrt(ua) * fa.x
    xb = np.array([0.5, 1.0, 1.5])
    pred = ub**0.25 * np.interp(np.sqrt(ub) * xb, y, g)
    got = np.interp(xb, fb.x, np.abs(fb.values))
    assert np.allclose(got, pred, rtol=1e-4)


def test_wave_nonpositive_pump(tmp_path):
    cfg = write_cfg(tmp_path, kind="sinusoidal", pump="pump.a = 0.2\npump.b = 0.5\npump.omega = 1")
    assert run(cfg, "wave", tmp_path / "o") == 2


def test_verify_passes_and_reports_h(tmp_path):
    cfg = write_cfg(tmp_path, n=1)
    assert run(cfg, "verify", tmp_path / "o") == 0
    d = json.loads((tmp_path / "o" / "conservation.json").read_text())
    assert d["passed"] and d["checks"]["slope"]["value"] >= 3.0
    assert all(v == 1.0 for v in d["provenance"]["h"].values())
    ladder = (tmp_path / "o" / "residual_ladder.csv").read_text().splitlines()
    assert ladder[0] == "dx,dtau,residual" and len(ladder) == 4


def test_verify_default_sinusoidal(tmp_path):
    cfg = write_cfg(tmp_path, n=2, k=1.5, beta=0.7, kind="sinusoidal", pump="pump.a = 1\npump.b = 0.3\npump.omega = 2")
    assert run(cfg, "verify", tmp_path / "o", "--jobs", "2") == 0


def test_verify_mutation_fails(tmp_path):
    cfg = write_cfg(tmp_path, n=2, k=1.5, beta=0.7, kind="sinusoidal", pump="pump.a = 1\npump.b = 0.3\npump.omega = 2")
    assert run(cfg, "verify", tmp_path / "o", "--mutate", "harmonic_offset") == 1
    d = json.loads((tmp_path / "o" / "conservation.json").read_text())
    assert d["checks"]["mutation_plateau"]["plateau"] >= 1e-4
    assert not d["checks"]["residual"]["passed"]


def test_mutate_only_for_verify(tmp_path):
    cfg = write_cfg(tmp_path)
    assert run(cfg, "spectrum", tmp_path / "o", "--mutate", "quartic_sign") == 2


def test_propagate_constant_single_mode(tmp_path):
    cfg = write_cfg(tmp_path, n=1, extra="tol.fidelity = 0.999999\n")
    assert run(cfg, "propagate", tmp_path / "o") == 0
    d = json.loads((tmp_path / "o" / "fidelity.json").read_text())
    assert min(d["fidelity"]) >= 1 - 1e-6
    assert len(list((tmp_path / "o").glob("checkpoint_*.csv"))) == 4


def test_propagate_free_smoke(tmp_path):
    cfg = write_cfg(tmp_path, extra="propagate.free = true\n")
    assert run(cfg, "propagate", tmp_path / "o") == 0
    d = json.loads((tmp_path / "o" / "fidelity.json").read_text())
    assert d["fidelity"] is None
    assert d["checks"]["discrete_norm"]["value"] <= 1e-12


def test_propagate_fidelity_threshold_failure(tmp_path):
    cfg = write_cfg(tmp_path, n=2, beta=0.5, kind="sinusoidal", pump="pump.a = 1\npump.b = 0.3\npump.omega = 2",
                    extra="superposition.modes = 0,1,2\ntol.fidelity = 1.0000001\n")
    assert run(cfg, "propagate", tmp_path / "o") == 1


def test_outputs_deterministic(tmp_path):
    cfg = write_cfg(tmp_path, n=2, beta=0.5, kind="sinusoidal", pump="pump.a = 1\npump.b = 0.3\npump.omega = 2",
                    extra="superposition.modes = 0,1,2\nsuperposition.weights = 1, 1j, -1\n")
    names = ("spectrum.json", "conservation.json", "fidelity.json", "residual_ladder.csv")
    runs = []
    for _ in range(2):
        for cmd in ("spectrum", "verify", "propagate"):
            assert run(cfg, cmd, tmp_path / "o") == 0
        runs.append([(tmp_path / "o" / name).read_bytes() for name in names])
    assert runs[0] == runs[1]


def test_missing_config_file(tmp_path):
    assert main(["spectrum", "--config", str(tmp_path / "nope.cfg")]) == 2
