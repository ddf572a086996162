import numpy as np
import pytest

from simdscan import default_html_set
from simdscan.kernels import get_backend

from helpers import COMPILED_BACKENDS


@pytest.fixture
def html_set():
    return default_html_set()


@pytest.fixture
def rng():
    return np.random.default_rng(20241018)


@pytest.fixture(params=COMPILED_BACKENDS)
def backend(request):
    return get_backend(request.param)


# one PASS/FAIL line per acceptance criterion in the terminal summary
_criteria: dict[int, tuple[str, list[str]]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when not in ("setup", "call"):
        return
    number, title = marker.args
    if rep.when == "setup" and rep.passed:
        return
    status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
    _criteria.setdefault(number, (title, []))[1].append(status)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, statuses = _criteria[number]
        if "FAIL" in statuses:
            verdict = "FAIL"
        elif all(s == "SKIP" for s in statuses):
            verdict = "SKIP"
        else:
            verdict = "PASS"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}  ({len(statuses)} checks)")
