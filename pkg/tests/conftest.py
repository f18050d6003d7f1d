import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from twouninorm import fixtures  # noqa: E402


@pytest.fixture(scope="session")
def L1():
    return fixtures.lattice("L1")


@pytest.fixture(scope="session")
def L2():
    return fixtures.lattice("L2")


@pytest.fixture(scope="session")
def table1():
    return fixtures.generator("table1")


@pytest.fixture(scope="session")
def diamond():
    from twouninorm import parse_lattice

    return parse_lattice(
        {"elements": ["0", "p", "q", "1"], "covers": [["0", "p"], ["0", "q"], ["p", "1"], ["q", "1"]], "bottom": "0", "top": "1"}
    )


@pytest.fixture(scope="session")
def data_dir():
    return Path(fixtures.DATA)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
