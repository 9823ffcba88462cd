import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

PROPERTY_KEY = pytest.StashKey[dict]()
_PROPERTY_OUTCOMES: dict = {}


def pytest_configure(config):
    config.stash[PROPERTY_KEY] = _PROPERTY_OUTCOMES


def pytest_collection_modifyitems(config, items):
    # acceptance last, so criterion 15 can read the property-suite outcomes
    items.sort(key=lambda it: it.module.__name__ == "test_acceptance")


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_properties.py" in report.nodeid:
        _PROPERTY_OUTCOMES[report.nodeid.split("::")[-1]] = report.passed


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    import acceptance

    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        ok, detail = mod.RESULTS[n]
        terminalreporter.write_line(acceptance.line(n, ok, detail))
