import numpy as np
import pytest

from embolic import _backend


@pytest.fixture(params=_backend.available())
def backend(request, monkeypatch):
    """Run a test once per importable kernel backend."""
    monkeypatch.setattr(_backend, "core", _backend.load(request.param))
    return request.param


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240607))


def random_disc(rng, n, rmax=0.95):
    """Points uniform in area inside radius ``rmax``."""
    r = rmax * np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


@pytest.fixture(scope="session")
def toy_run(tmp_path_factory):
    """Output directory of one full pipeline run on the bundled toy corpus."""
    from embolic.config import load_config
    from embolic.pipeline import run_pipeline

    out = tmp_path_factory.mktemp("toy")
    cfg = load_config("@toy", {"out": str(out)})
    run_pipeline(cfg, echo=lambda s: None)
    return out


# one (status, line) entry per acceptance criterion, reported after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for status, line in ACCEPTANCE:
            terminalreporter.write_line(f"{status} {line}")
