import pytest

_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the test body fills in ``detail`` and ``elapsed``."""
    number, title, limit = request.node.get_closest_marker("criterion").args
    state = {"detail": "", "elapsed": None}
    yield state
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    took = "" if state["elapsed"] is None else f" [{state['elapsed']:.2f}s / limit {limit}s]"
    _CRITERIA[number] = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {title}{took} {state['detail']}".rstrip()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, limit): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[n])
