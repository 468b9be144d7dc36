import numpy as np
import pytest

from bootcover import _backend

BACKENDS = ["python"] + (["cython"] if _backend.compiled is not None else [])

# filled by test_acceptance.py, printed after the run
ACCEPTANCE_LINES = []


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
