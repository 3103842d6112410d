"""Shared fixtures.  Acceptance tests register a one-line verdict that is
printed in the terminal summary, whether or not the assertion fails."""

import pytest

_VERDICTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def verdict():
    def record(name: str, ok: bool, detail: str) -> bool:
        _VERDICTS.append((name, bool(ok), detail))
        return bool(ok)
    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _VERDICTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
