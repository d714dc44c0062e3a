import os

import mpmath
import pytest
from hypothesis import HealthCheck, settings

import acceptance_log

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(autouse=True)
def _oracle_precision():
    dps = mpmath.mp.dps
    mpmath.mp.dps = 50
    yield
    mpmath.mp.dps = dps


def pytest_terminal_summary(terminalreporter):
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
