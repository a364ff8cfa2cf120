import numpy as np
import pytest

from qestd.algebra import ModelParams, spectrum
from qestd.model import SuperpositionSpec, WaveField, psi_closed_form, truncation_radius
from qestd.propagator import (
    FDConfinementError,
    PropagationConfig,
    PropagationConfigError,
    discrete_norm,
    fidelity,
    nearest,
    propagate,
    propagate_trajectory,
    stationary_eigs_fd,
)
from qestd.pump import PumpProfile


def test_free_gaussian_norm_conserved():
    cfg = PropagationConfig(0.0, 10.0, 2001, 0.0, 1.0, 1000, "even-reflect")
    x = cfg.grid
    init = WaveField(x, np.exp(-(x**2)), whole_line=True)
    out = propagate(init, ModelParams(0), PumpProfile.constant(1.0), cfg, potential_fn=lambda x, t: 0 * x)
    assert abs(discrete_norm(out.values, cfg.dx, cfg.boundary) / discrete_norm(init.values, cfg.dx, cfg.boundary) - 1) <= 1e-12


def test_free_gaussian_dirichlet_norm_conserved():
    cfg = PropagationConfig(-10.0, 10.0, 2001, 0.0, 1.0, 1000, "dirichlet-both")
    x = cfg.grid
    init = WaveField(x, np.exp(-((x - 1) ** 2) + 2j * x))
    out = propagate(init, ModelParams(0), PumpProfile.constant(1.0), cfg, potential_fn=lambda x, t: 0 * x)
    assert abs(discrete_norm(out.values, cfg.dx, cfg.boundary) / discrete_norm(init.values, cfg.dx, cfg.boundary) - 1) <= 1e-12


def test_constant_pump_mode_fidelity():
    p = ModelParams(1)
    prof = PumpProfile.constant(1.0, horizon=1.0)
    s = spectrum(p)
    spec = SuperpositionSpec.single(0)
    cfg = PropagationConfig.for_model(p, prof, 4001, 1.0, 4000)
    init = psi_closed_form(p, prof, s, spec, cfg.grid, 0.0)
    traj = propagate_trajectory(init, p, prof, cfg, checkpoints=5)
    assert [f.t for f in traj] == pytest.approx([0, 0.2, 0.4, 0.6, 0.8, 1.0])
    exact = psi_closed_form(p, prof, s, spec, cfg.grid, 1.0)
    assert fidelity(traj[-1], exact) >= 0.9999
    # stationarity at every checkpoint
    for f in traj:
        assert fidelity(f, init) >= 1 - 1e-6


@pytest.mark.parametrize("k", [1.0, 1.5])
def test_half_line_dirichlet_mode(k):
    p = ModelParams(1, k, 0.3)
    prof = PumpProfile.exponential(1.0, 0.2, horizon=0.5)
    s = spectrum(p)
    spec = SuperpositionSpec.single(1)
    cfg = PropagationConfig.for_model(p, prof, 3001, 0.5, 2000)
    assert cfg.boundary == "dirichlet-both" and cfg.x_min == pytest.approx(cfg.dx)
    init = psi_closed_form(p, prof, s, spec, cfg.grid, 0.0)
    out = propagate(init, p, prof, cfg)
    assert fidelity(out, psi_closed_form(p, prof, s, spec, cfg.grid, 0.5)) >= 0.9999


def test_fidelity_trivial(n2_free):
    p, s = n2_free
    prof = PumpProfile.constant(1.0)
    grid = np.linspace(0, truncation_radius(prof), 2001)
    a = psi_closed_form(p, prof, s, SuperpositionSpec.single(0), grid, 0.0)
    b = psi_closed_form(p, prof, s, SuperpositionSpec.single(1), grid, 0.0)
    assert fidelity(a, a) == pytest.approx(1.0, abs=1e-14)
    assert fidelity(a, a.with_values(1j * a.values)) == pytest.approx(1.0, abs=1e-14)
    assert fidelity(a, b) <= 1e-8
    with pytest.raises(ValueError):
        fidelity(a, a.with_values(np.zeros_like(a.values)))


def test_config_invariants():
    with pytest.raises(PropagationConfigError):
        PropagationConfig(0.0, 5.0, 100, 0.0, 1.0, 1000)
    with pytest.raises(PropagationConfigError):
        PropagationConfig(0.0, 5.0, 1001, 0.0, 1.0, 50)
    with pytest.raises(PropagationConfigError):
        PropagationConfig(0.1, 5.0, 1001, 0.0, 1.0, 500, "even-reflect")
    p = ModelParams(1, 1.5, 0.0)
    prof = PumpProfile.constant(1.0)
    bad = PropagationConfig(0.0, 6.0, 1001, 0.0, 1.0, 500, "even-reflect")
    init = WaveField(bad.grid, np.zeros(1001))
    with pytest.raises(PropagationConfigError):
        propagate(init, p, prof, bad)
    short = PropagationConfig(0.0, 3.0, 1001, 0.0, 1.0, 500, "even-reflect")
    with pytest.raises(PropagationConfigError):
        propagate(WaveField(short.grid, np.zeros(1001)), ModelParams(1), prof, short)


def test_harmonic_oracle():
    x = np.linspace(-10, 10, 4001)
    e = stationary_eigs_fd(None, 1.0, x, 3, potential_fn=lambda x: x**2)
    assert np.allclose(e, [1, 3, 5], atol=1e-3)


def test_fd_even_spectrum_n1():
    x = np.linspace(0, truncation_radius(PumpProfile.constant(1.0)), 4001)
    e = stationary_eigs_fd(ModelParams(1), 1.0, x, 3)
    assert np.all(nearest(e, [-2 * np.sqrt(2), 2 * np.sqrt(2)]) <= 1e-3)


def test_fd_even_spectrum_n2():
    x = np.linspace(0, truncation_radius(PumpProfile.constant(1.0)), 4001)
    e = stationary_eigs_fd(ModelParams(2), 1.0, x, 4)
    assert np.all(nearest(e, [-8, 0, 8]) <= 2e-3)


@pytest.mark.parametrize("n,k,beta,u", [(2, 0.0, 0.5, 1.3), (1, 1.5, -0.4, 0.8)])
def test_energy_identity_second_order(n, k, beta, u):
    p = ModelParams(n, k, beta)
    targets = 4 * u * spectrum(p).eigenvalues
    R = truncation_radius(PumpProfile.constant(u))
    errs = []
    for N in (1001, 2001, 4001):
        if k == 0:
            x = np.linspace(0, R, N)
        else:
            dx = R / N
            x = dx * np.arange(1, N + 1)
        e = stationary_eigs_fd(p, u, x, n + 2)
        errs.append(nearest(e, targets).max())
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 1.7) and np.all(orders < 2.3)


def test_fd_confinement_error():
    x = np.linspace(0, 1.0, 401)
    with pytest.raises(FDConfinementError):
        stationary_eigs_fd(ModelParams(1), 1.0, x, 5)


def test_fd_grid_cap():
    with pytest.raises(PropagationConfigError):
        stationary_eigs_fd(ModelParams(1), 1.0, np.linspace(0, 5, 9001), 2)
