import functools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from porostab.energystab import critical_point_energy_spanwise  # noqa: E402
from porostab.linstab import critical_point_linear  # noqa: E402

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def linear_critical(M, N=None):
    return critical_point_linear(M, N=N)


@functools.lru_cache(maxsize=None)
def energy_critical(M, N=None):
    return critical_point_energy_spanwise(M, N=N)


@pytest.fixture
def acceptance_report():
    def record(criterion, ok, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
