import pytest

from homogen.core import Structure
from homogen.witness import remark_structure

A4_R = frozenset({(0, 1), (1, 2), (2, 3), (3, 0)})
A4_S = frozenset({(0, 1, 2, 3), (2, 3, 0, 1)})


def make_a4():
    return Structure(4, A4_R, A4_S, name="A4")


@pytest.fixture
def a4():
    return make_a4()


@pytest.fixture
def remark_b():
    return remark_structure()


# acceptance summary: one line per criterion, printed after the run

_criteria: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and not (report.when == "setup" and report.failed):
        return
    number, title = marker.args
    status = "PASS" if report.passed else "FAIL"
    _, before, spent = _criteria.get(number, (title, "PASS", 0.0))
    _criteria[number] = (title, "FAIL" if "FAIL" in (before, status) else "PASS",
                         spent + report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, status, duration = _criteria[number]
        terminalreporter.write_line(f"criterion {number} [{title}]: {status} ({duration:.2f}s)")
