import sys

import pytest

from polycontact import run_census


@pytest.fixture(scope="session")
def census_cache():
    cache = {}

    def get(model, dim, N, rule=None):
        key = (model, dim, N, str(rule))
        if key not in cache:
            cache[key] = run_census(model, dim, N, rule)
        return cache[key]

    return get


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[0][2:])):
            terminalreporter.write_line(line)
