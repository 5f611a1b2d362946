import pytest

from twistl.characters import DirichletCharacter, build_table
from twistl.forms import delta_form
from twistl.lfunc import TwistSweep, twist


@pytest.fixture(scope="session")
def delta():
    return delta_form(20000)


@pytest.fixture(scope="session")
def delta_big():
    return delta_form(100000)


@pytest.fixture(scope="session")
def table101():
    return build_table(101)


@pytest.fixture(scope="session")
def TL101(delta, table101):
    return twist(delta, DirichletCharacter(table101, 1))


@pytest.fixture(scope="session")
def sweep101(delta, table101):
    return TwistSweep(delta, table101)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
