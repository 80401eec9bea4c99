from collections import defaultdict
from functools import lru_cache

import pytest

from spinfock import numoracle
from spinfock.models import ModelId, radial_reduce


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


_OUTCOMES = defaultdict(list)
_TITLES = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    _TITLES[number] = title
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _OUTCOMES[number].append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        status = "PASS" if all(_OUTCOMES[number]) else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}  {status}  {_TITLES[number]}")


@lru_cache(maxsize=None)
def _levels(model, j, grid, k):
    A = numoracle.discretize(radial_reduce(model, j), grid)
    return A, numoracle.eigensolve(A, k, (-1.0, -1e-6))


@pytest.fixture(scope="session")
def oracle():
    """oracle(model, j, grid=PRODUCTION_GRID) -> (operator, [(eigenvalue, GridFunction), ...]).

    Cached across the session; the production-grid solves dominate the runtime.
    """
    def solve(model, j, grid=numoracle.PRODUCTION_GRID):
        k = 4 if model is ModelId.SPIN_ORBIT else 3
        return _levels(model, j, grid, k)
    return solve
