import numpy as np
import pytest

from renewal_kac import DiscreteAtoms, Exponential, Gamma, RngStream, Uniform


LAWS = {
    "exponential": Exponential(1.0),
    "gamma": Gamma(2.0, 3.0),
    "uniform": Uniform(0.0, 1.0),
    "atoms": DiscreteAtoms((0.0, 0.5, 2.0), (0.2, 0.5, 0.3)),
}


@pytest.fixture
def stream():
    return RngStream(12345)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(RESULTS, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {name}: {detail}")
