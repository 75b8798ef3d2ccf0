import numpy as np
import pytest

from paulivol import _backend

BACKENDS = ["python"] + (["cython"] if _backend.COMPILED else [])


@pytest.fixture(params=BACKENDS)
def kernels(request):
    return _backend.get_kernels(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hermitian(rng, n, size):
    m = rng.normal(size=(size, n, n)) + 1j * rng.normal(size=(size, n, n))
    return 0.5 * (m + np.conj(np.swapaxes(m, 1, 2)))


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
