import numpy as np
import pytest

from radial_toeplitz import backend
from radial_toeplitz.quadrature import abs_oscillatory_moment, moment_compact
from radial_toeplitz.symbols import parse_symbol


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # trigger JIT compilation once so timed acceptance criteria measure
    # compute, not compiler
    V = parse_symbol("chi(0,0.5)+0*sin(r)*exp(-r^2)")
    moment_compact(V, 99.0, 1.0, 1e-8)
    moment_compact(V, 3.0, 1.0, 1e-8)
    abs_oscillatory_moment(2.0, 4.0, 2, 1e-6)
    yield


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def pytest_report_header(config):
    return f"radial_toeplitz kernel backend: {backend.get_backend()}"
