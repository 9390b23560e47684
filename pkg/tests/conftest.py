"""Collects acceptance-criterion outcomes and prints one line per criterion."""
import pytest

_RESULTS = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.fixture
def detail(request):
    """Attach a short measurement summary to the criterion line."""

    def note(text):
        request.node.criterion_detail = text

    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        number, title = marker.args
        _RESULTS.append((number, title, rep.passed, getattr(item, "criterion_detail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, note in sorted(_RESULTS):
        line = f"{'PASS' if ok else 'FAIL'}  AC{number:02d} {title}"
        terminalreporter.write_line(line + (f": {note}" if note else ""))
