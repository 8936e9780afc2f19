import pathlib
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from desopacity.model import load_model  # noqa: E402

# fixed example streams keep the suite reproducible and its runtime predictable
settings.register_profile("repro", derandomize=True)
settings.load_profile("repro")

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

# Estimate names used in the figures of the running example.
M = {0: "0 1", 1: "2", 2: "3 4", 3: "5 6", 4: "7", 5: "8 9", 6: "10"}
C = {0: "0 2", 1: "1", 2: "3 5", 3: "4 6", 4: "7", 5: "8 10", 6: "9"}
M = {k: frozenset(v.split()) for k, v in M.items()}
C = {k: frozenset(v.split()) for k, v in C.items()}
M_INV = {v: k for k, v in M.items()}
C_INV = {v: k for k, v in C.items()}


def S(*xs):
    return frozenset(str(x) for x in xs)


@pytest.fixture(scope="session")
def figure3():
    return load_model(FIXTURES / "figure3.des")


@pytest.fixture(scope="session")
def figure3_path():
    return FIXTURES / "figure3.des"


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, text = RESULTS[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {text}")
