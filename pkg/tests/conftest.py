import os
from collections import defaultdict

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", parent=settings.get_profile("default"), max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_outcomes: dict[str, list[str]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion the test belongs to")


def pytest_runtest_logreport(report):
    if report.when == "call" or report.outcome != "passed":
        for label in getattr(report, "criteria", ()):
            _outcomes[label].append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    report.criteria = [str(m.args[0]) for m in item.iter_markers("criterion")]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")

    def order(label):
        return (0, int(label)) if label.isdigit() else (1, label)

    for label in sorted(_outcomes, key=order):
        results = _outcomes[label]
        verdict = "PASS" if all(r == "passed" for r in results) else "FAIL"
        failed = sum(r != "passed" for r in results)
        detail = f"{len(results)} check{'' if len(results) == 1 else 's'}" + (f", {failed} failing" if failed else "")
        terminalreporter.write_line(f"ACCEPTANCE criterion {label}: {verdict} ({detail})")
