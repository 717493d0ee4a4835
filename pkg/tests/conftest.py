import time

import pytest

# criterion number -> (title, outcome, detail)
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


@pytest.fixture
def criterion(request):
    """Detail recorder for an acceptance test; the outcome comes from the report."""
    detail = []
    request.node._criterion_detail = detail
    request.node._criterion_t0 = time.perf_counter()
    return detail.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    num, title = mark.args
    detail = "; ".join(getattr(item, "_criterion_detail", []))
    t0 = getattr(item, "_criterion_t0", None)
    if t0 is not None:
        detail = (detail + "; " if detail else "") + f"{time.perf_counter() - t0:.1f} s"
    _CRITERIA[num] = (title, "PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, verdict, detail = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:2d} {verdict}: {title} ({detail})")
