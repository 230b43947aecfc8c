import pytest

# (number, title) -> "PASS" / "FAIL", filled in by the acceptance suite
CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and not report.failed:
        return
    key = marker.args
    verdict = "PASS" if report.passed else "FAIL"
    # a criterion split over several tests passes only if all of them do
    if CRITERIA.get(key) != "FAIL":
        CRITERIA[key] = verdict


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), verdict in sorted(CRITERIA.items()):
        terminalreporter.write_line(f"{verdict} criterion {number}: {title}")
