import numpy as np
import pytest

from llgfrac import _backend

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def available_backends():
    names = ["python"]
    if _backend.compiled is not None:
        names.append("compiled")
    return names


@pytest.fixture(params=available_backends())
def backend(request):
    previous = _backend.kernels.NAME
    _backend.use(request.param)
    yield request.param
    _backend.use(previous)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
