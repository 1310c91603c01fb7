from __future__ import annotations

from collections import OrderedDict

import pytest

from rulesys import fixtures

_RESULTS: "OrderedDict[str, list[tuple[str, str]]]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        key = f"{marker.args[0]}. {marker.args[1]}"
        _RESULTS.setdefault(key, []).append((item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.write_sep("=", "acceptance criteria")
    for key, runs in _RESULTS.items():
        ok = all(o == "passed" for _, o in runs)
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}")
        for name, o in runs:
            tr.write_line(f"         {'pass' if o == 'passed' else o:<7} {name}")


@pytest.fixture(scope="session")
def toy_schema():
    return fixtures.toy_schema()


@pytest.fixture(scope="session")
def toy_system():
    return fixtures.toy_system()


@pytest.fixture(scope="session")
def toy_reduced():
    return fixtures.toy_reduced()


@pytest.fixture(scope="session")
def toy_data():
    return fixtures.toy_dataset()


@pytest.fixture(scope="session")
def bk_schema():
    return fixtures.bankruptcy_schema()


@pytest.fixture(scope="session")
def ga():
    return fixtures.bankruptcy_system("ga")


@pytest.fixture(scope="session")
def il():
    return fixtures.bankruptcy_system("il")


@pytest.fixture(scope="session")
def nn():
    return fixtures.bankruptcy_system("nn")


@pytest.fixture(scope="session")
def ga_reduced_published():
    return fixtures.bankruptcy_system("ga_reduced")
