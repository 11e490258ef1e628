import pytest

from quasiavg import ConstructionSpec

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def thm13():
    return ConstructionSpec(p=0.5, variant="thm13", b=3.0)


@pytest.fixture(scope="session")
def thm14():
    return ConstructionSpec(p=0.5, variant="thm14")


@pytest.fixture(scope="session")
def thm15():
    return ConstructionSpec(p=0.5, variant="thm15")


@pytest.fixture(scope="session")
def banach():
    """p = 1 control: A_q = 1/q, geometric beta."""
    return ConstructionSpec(p=1.0, variant="custom", a_rule="power:1", beta_rule="geometric")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
