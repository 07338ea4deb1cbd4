import numpy as np
import pytest
from hypothesis import settings
import hypothesis.strategies as st

from fitted_mpfa.grid import TensorGrid, build_graded
from fitted_mpfa.model import ModelParams

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@st.composite
def model_params(draw, strike=100.0, maturity=0.25):
    s1 = draw(st.floats(0.1, 1.0))
    s2 = draw(st.floats(0.1, 1.0))
    rho = draw(st.floats(-0.9, 0.9))
    r = draw(st.floats(0.0, 0.5))
    return ModelParams(s1, s2, rho, r, strike, maturity)


def random_params(rng, strike=100.0, maturity=0.25):
    return ModelParams(rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0), rng.uniform(-0.9, 0.9),
                       rng.uniform(0.0, 0.5), strike, maturity)


def graded_grid(n, x_max=300.0, focus=100.0, strength=3.0):
    return TensorGrid(build_graded(n, x_max, focus, strength), build_graded(n, x_max, focus, strength))


@pytest.fixture
def table1_params():
    return ModelParams(0.3, 0.3, 0.5, 0.1, 100.0, 1.0 / 6.0)


@pytest.fixture
def table4_params():
    return ModelParams(1.0, 1.0, 0.3, 0.5, 1.0, 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
