import sys

import pytest
from hypothesis import strategies as st

from pqlattice.lattice import validate_params

GRID = [(7, 3), (8, 3), (4, 5), (5, 4), (4, 6), (3, 7), (3, 8)]


def hyperbolic_pairs(limit: int = 20):
    return st.tuples(st.integers(3, limit), st.integers(3, limit)).filter(lambda t: t[0] * t[1] > 2 * (t[0] + t[1]))


@pytest.fixture(params=GRID, ids=lambda t: f"{t[0]}-{t[1]}")
def grid_params(request):
    return validate_params(*request.param)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
