import pytest

import expect

_ACCEPTANCE: dict = {}
_NOTES: list = []


@pytest.fixture
def ten():
    return expect.ten_agents()


@pytest.fixture
def nostable():
    return expect.no_stable4()


@pytest.fixture
def report():
    """Append a line to the end-of-run acceptance section (for report-only checks)."""
    return _NOTES.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    number, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        # a criterion split over several tests passes only if all of them do
        _, before = _ACCEPTANCE.get(number, (title, True))
        _ACCEPTANCE[number] = (title, before and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE and not _NOTES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, passed = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}")
    for line in _NOTES:
        terminalreporter.write_line(line)
