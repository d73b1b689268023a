import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dqlab import distributions as dist

settings.register_profile("dqlab", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("dqlab")

SEED = 20240901


@pytest.fixture(scope="session")
def sigma1():
    return dist.equicorrelated(4, 0.3)


@pytest.fixture(scope="session")
def sigma2():
    return dist.ar1(4, 0.3)


@pytest.fixture(scope="session")
def example1_sigma():
    return np.array([[1.0, 0.5], [0.5, 2.0]])


def pytest_terminal_summary(terminalreporter):
    """Print the acceptance lines recorded by ``tests/test_acceptance.py``, one per criterion."""
    lines = []
    for key in ("passed", "failed"):
        for report in terminalreporter.stats.get(key, []):
            if getattr(report, "when", None) != "call":
                continue
            lines += [value for name, value in report.user_properties if name == "acceptance"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
