import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20130606)


def digital_disk_count(rho):
    """Brute-force count of integer offsets inside a closed disk."""
    r = int(np.ceil(rho))
    return sum(1 for i in range(-r, r + 1) for j in range(-r, r + 1) if i * i + j * j <= rho * rho)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
