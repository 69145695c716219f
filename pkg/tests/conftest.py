from pathlib import Path

import pytest

from catmos.query_model import RangeQuery

SCENARIO_PATH = str(Path(__file__).resolve().parent.parent / "scenarios" / "table1.scn")

TABLE1_ROWS = [
    (10, 50, 5), (10, 40, 8), (10, 50, 5), (10, 35, 40), (15, 25, 50),
    (15, 30, 10), (5, 55, 120), (25, 50, 130), (30, 45, 60), (35, 50, 70),
]


def table1_queries(lifetime=100):
    return [RangeQuery("temp", lo, hi, ep, lifetime, id=i)
            for i, (lo, hi, ep) in enumerate(TABLE1_ROWS, 1)]


@pytest.fixture
def table1():
    return table1_queries()


# Acceptance results, one line per criterion, printed after the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
