from importlib import resources
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


@pytest.fixture
def mini_paths():
    root = resources.files("medtextcat.data") / "mini"
    return str(root / "train.tsv"), str(root / "test.tsv")


_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and (report.when == "call" or report.outcome == "skipped" and report.when == "setup"):
        name = report.nodeid.split("::")[-1]
        detail = dict(report.user_properties).get("detail", "")
        if report.outcome == "skipped" and isinstance(report.longrepr, tuple):
            detail = report.longrepr[2]
        _ACCEPTANCE.append((name, report.outcome.upper(), detail))


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for name, outcome, detail in _ACCEPTANCE:
            terminalreporter.write_line(f"{outcome:8s} {name}: {detail}")
