import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)



_CRITERIA: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not (rep.when == "call" or rep.failed):
        return
    ok, notes = _CRITERIA.setdefault(mark.args[0], [True, []])
    _CRITERIA[mark.args[0]][0] = ok and rep.passed
    notes += [str(v) for k, v in rep.user_properties if k == "detail"]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        ok, notes = _CRITERIA[num]
        line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}"
        if notes:
            line += "  " + "; ".join(notes)
        terminalreporter.write_line(line)
