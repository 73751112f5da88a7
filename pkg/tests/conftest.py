import numpy as np
import pytest

import twostage as ts

# one line per acceptance criterion, echoed after the test summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def det():
    return ts.Deterministic()


@pytest.fixture(scope="session")
def sweep_laws():
    """A modest cross-section of laws used by several property suites."""
    laws = []
    for beta in (0.0, 1.0, 10.0):
        for mu in (-1.0, 0.0, 1.0):
            for n in (1, 10, 100):
                laws.append(ts.StatisticLaw(ts.Probabilistic(0.0, beta),
                                            ts.TrialParams(mu, n)))
    for mu in (-1.0, 0.0, 1.0):
        for n in (1, 10, 100):
            laws.append(ts.StatisticLaw(ts.Deterministic(),
                                        ts.TrialParams(mu, n)))
    return laws


def grid(lo, hi, step):
    return np.arange(lo, hi + step / 2, step)
