import pytest
from hypothesis import settings

from jetvar.jetcore import JetContext
from jetvar.systems import builtin_system

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def pmkdv():
    return builtin_system("pmkdv")


@pytest.fixture
def tx():
    return JetContext(("t", "x"))


@pytest.fixture
def txy():
    return JetContext(("t", "x", "y"))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
