import json
import warnings
from pathlib import Path

import pytest

from xeit.params import CavityParams, HyperfineField
from xeit.pulses import Gaussian

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def eit_params():
    return CavityParams(kappa=4.6e5, kappa_R=3.1e5, delta_c=0.0, g=2500.0, n_nuclei=1, a_in=1.0)


@pytest.fixture
def eit_field():
    return HyperfineField.from_phi(6.0)


@pytest.fixture
def desk_params():
    # g*sqrt(N) = 10 gamma, deep in the bad-cavity regime
    return CavityParams(kappa=4.6e5, kappa_R=3.1e5, g=10.0, n_nuclei=1)


@pytest.fixture
def probe():
    return Gaussian(1.0, 0.2, 0.0)


def load_config(name: str) -> dict:
    return json.loads((CONFIGS / name).read_text())


@pytest.fixture(autouse=True)
def _quiet_adiabaticity():
    from xeit.schedule import AdiabaticityWarning

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AdiabaticityWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
