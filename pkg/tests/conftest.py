import numpy as np
import pytest

from qestd import ModelParams, PumpProfile, spectrum


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def sinusoidal():
    return PumpProfile.sinusoidal(1.0, 0.3, 2.0, horizon=2.0)


@pytest.fixture
def all_profiles():
    return [
        PumpProfile.constant(2.0, horizon=3.0),
        PumpProfile.exponential(1.3, 0.4, horizon=3.0),
        PumpProfile.sinusoidal(1.0, 0.3, 2.0, horizon=3.0),
        PumpProfile.rational(0.8, 0.5, horizon=3.0),
    ]


@pytest.fixture
def n2_free():
    p = ModelParams(2, 0.0, 0.0)
    return p, spectrum(p)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per criterion, then assert."""

    def report(name: str, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
