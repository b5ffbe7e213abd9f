import numpy as np
import pytest

from xorder import Exponential, GammaInt, GenExponential, PowerOf, TailPowerOf, UQuadratic, Weibull


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def every_family():
    """One representative per distribution type, with hand-picked parameters."""
    W2 = Weibull(2.0, 1.0)
    return [
        Exponential(1.3),
        Weibull(0.5, 2.0),
        W2,
        GammaInt(3, 1.5),
        GenExponential(2.5, 0.7),
        UQuadratic(0.0, 4.0),
        PowerOf(W2, 3.0),
        TailPowerOf(W2, 2.0),
    ]


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
