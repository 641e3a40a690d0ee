import os

import pytest
from hypothesis import HealthCheck, settings

from varbic.gr import gr_theory
from varbic.jetscalar import metric_ring

settings.register_profile(
    "varbic",
    max_examples=int(os.environ.get("VARBIC_EXAMPLES", "25")),
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("varbic")

# lines recorded by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ring2():
    return metric_ring(2)


@pytest.fixture(scope="session")
def ring3():
    return metric_ring(3)


@pytest.fixture(scope="session")
def theory2():
    return gr_theory(2)


@pytest.fixture(scope="session")
def theory3():
    return gr_theory(3)
