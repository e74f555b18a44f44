from fractions import Fraction

import pytest

from relfix.document import load


@pytest.fixture(scope="session")
def doc41():
    return load("example4.1")


@pytest.fixture(scope="session")
def doc42():
    return load("example4.2")


@pytest.fixture(scope="session")
def doc43():
    return load("example4.3")


@pytest.fixture(scope="session")
def e1(doc41):
    return doc41.instance


@pytest.fixture(scope="session")
def e2(doc42):
    return doc42.instance


@pytest.fixture(scope="session")
def e3(doc43):
    return doc43.instance


def F(text) -> Fraction:
    return Fraction(text)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
