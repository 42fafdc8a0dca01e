import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from flowscope.scenarios import (
    gateway_demo,
    gateway_observations,
    pentagon_demo,
    pentagon_observations,
)

_ACCEPTANCE_FILE = "test_acceptance.py"
_acceptance_results: dict[str, bool] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if Path(str(item.fspath)).name != _ACCEPTANCE_FILE:
        return
    if report.when == "call":
        _acceptance_results[item.name] = report.passed
    elif report.failed:  # setup/teardown error counts as a failure
        _acceptance_results[item.name] = False


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, ok in _acceptance_results.items():
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}")


@pytest.fixture
def gateway_net():
    return gateway_demo()


@pytest.fixture
def gateway_placement():
    return gateway_observations()


@pytest.fixture
def pentagon_net():
    return pentagon_demo()


@pytest.fixture
def pentagon_placement():
    return pentagon_observations()
