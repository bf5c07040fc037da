import copy

import pytest
import yaml

from atnsim.demand import bundled_path, load_scenario

ACCEPTANCE_RESULTS = []


@pytest.fixture(scope="session")
def katrina_doc():
    with open(bundled_path("katrina-synthetic"), encoding="utf-8") as fh:
        return yaml.safe_load(fh)


@pytest.fixture
def katrina_raw(katrina_doc):
    return copy.deepcopy(katrina_doc)


@pytest.fixture(scope="session")
def katrina():
    return load_scenario("katrina-synthetic")


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        ACCEPTANCE_RESULTS.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
