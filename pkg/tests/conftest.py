import os

import pytest

from hypothesis import HealthCheck, settings

# parsing makes individual examples slow; determinism matters more than speed here
settings.register_profile("repo", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

_verdicts: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _verdicts[marker] = "PASS" if report.outcome == "passed" else "FAIL"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        outcome.get_result().criterion = mark.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_verdicts, key=lambda s: int(s.split(".")[0])):
        terminalreporter.write_line(f"{_verdicts[label]}  {label}")
