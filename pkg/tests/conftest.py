import numpy as np
import pytest

from semiclab.lattice import SpatialGrid


@pytest.fixture
def grid512():
    return SpatialGrid(1, 10.0, 512)


@pytest.fixture
def grid128():
    return SpatialGrid(1, 4.0, 128)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# --- acceptance summary ----------------------------------------------------------------------

_ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = {}
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance criteria (minutes)")


@pytest.fixture
def record(request):
    """record(number, passed, detail): one summary line per acceptance criterion."""
    lines = request.config.stash[_ACCEPTANCE]

    def rec(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        lines[number] = line
        print(line)

    return rec


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
