from pathlib import Path

import pytest

from pismg import parse_game

REPO_ROOT = Path(__file__).resolve().parents[1]
EXAMPLE_PATH = REPO_ROOT / "example_s5.json"


@pytest.fixture(scope="session")
def example_path() -> Path:
    return EXAMPLE_PATH


@pytest.fixture(scope="session")
def example_spec():
    return parse_game(EXAMPLE_PATH.read_text())


# One pass/fail line per acceptance criterion at the end of the run.

_acceptance_outcomes: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call":
        _acceptance_outcomes[name] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup" and report.skipped:
        _acceptance_outcomes[name] = "SKIP"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(_acceptance_outcomes):
        terminalreporter.write_line(f"{name}: {_acceptance_outcomes[name]}")
