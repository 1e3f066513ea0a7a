import time

import pytest

from foitsmc.scenario import builtin_scenario
from foitsmc.simulate import run

# (criterion, verdict, detail) lines collected by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []

_RUNS: dict = {}


def cached_run(name: str):
    """Built-in scenario, its trajectory and the wall time of the run (one run per session)."""
    if name not in _RUNS:
        sc = builtin_scenario(name)
        t0 = time.perf_counter()
        tr = run(sc)
        _RUNS[name] = (sc, tr, time.perf_counter() - t0)
    return _RUNS[name]


@pytest.fixture
def runs():
    return cached_run


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
