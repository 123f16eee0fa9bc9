import numpy as np
import pytest

from quasijump.curves import make_circle_pair, make_ellipse_pair, make_perturbed_pair


@pytest.fixture(scope="session")
def circle():
    return make_circle_pair()


@pytest.fixture(scope="session")
def ellipse():
    return make_ellipse_pair(1.2, 0.8)


@pytest.fixture(scope="session")
def perturbed():
    return make_perturbed_pair(0.2, 2)


@pytest.fixture(scope="session")
def pairs(circle, ellipse, perturbed):
    return {"circle": circle, "ellipse": ellipse, "perturbed": perturbed}


@pytest.fixture(params=["circle", "ellipse", "perturbed"])
def pair(request, pairs):
    return pairs[request.param]


@pytest.fixture(params=["ellipse", "perturbed"])
def noncircle(request, pairs):
    return pairs[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
