import sys

import pytest

from stallings.counting import build_injection_table

A002720 = [1, 2, 7, 34, 209, 1546, 13327, 130922, 1441729, 17572114, 234662231]


@pytest.fixture(scope="session")
def small_table():
    return build_injection_table(60)


@pytest.fixture(scope="session")
def table_500():
    return build_injection_table(500)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
