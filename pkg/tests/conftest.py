from __future__ import annotations

import pytest

_acceptance: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion id")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    number, title = marker.args
    detail = getattr(item, "acceptance_detail", "")
    _acceptance[number] = ("PASS" if rep.passed else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        status, title, detail = _acceptance[number]
        line = f"[{status}] {number}. {title}"
        terminalreporter.write_line(f"{line} ({detail})" if detail else line)


@pytest.fixture
def detail(request):
    """Attach a one-line measurement summary to the acceptance report."""

    def record(text: str) -> None:
        request.node.acceptance_detail = text

    return record
