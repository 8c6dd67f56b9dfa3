from fractions import Fraction
from pathlib import Path

import pytest

from combagg.fileio import parse_examination

ROOT = Path(__file__).resolve().parents[1]
WORKED_EXAMPLE = ROOT / "fixtures" / "worked_example.json"

# unified judgments per expert, pairs (1,2),(1,3),(1,4),(2,3),(2,4),(3,4), and their grade counts
UNIFIED_VALUES = [
    [Fraction(2), Fraction(13, 3), Fraction(53, 6), Fraction(16, 7), Fraction(13, 2), Fraction(17, 6)],
    [Fraction(15, 2), Fraction(49, 6), Fraction(17, 2), Fraction(16, 7), Fraction(7, 2), Fraction(2)],
    [Fraction(2), Fraction(4), Fraction(9), Fraction(7, 2), Fraction(5), Fraction(7, 2)],
]
GRADE_COUNTS = [
    [9, 8, 7, 6, 5, 4],
    [3, 4, 5, 6, 7, 8],
    [9, 9, 8, 3, 9, 7],
]
PAIRS4 = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]


@pytest.fixture(scope="session")
def example():
    return parse_examination(WORKED_EXAMPLE)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config._acceptance = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        item.config._acceptance.append((marker.args[0], marker.args[1], report.outcome))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance", [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome in sorted(results, key=lambda r: r[0]):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}")
