from __future__ import annotations

import pytest

# criterion number -> (passed, detail), filled by the acceptance tests
RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    def record(k: int, checks: dict[str, bool], detail: str = "") -> None:
        failed = [name for name, ok in checks.items() if not ok]
        note = detail + (f"; failed: {', '.join(failed)}" if failed else "")
        RESULTS[k] = (not failed, note)
        assert not failed, f"criterion {k}: {note}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        ok, note = RESULTS[k]
        terminalreporter.write_line(f"CRITERION {k}: {'PASS' if ok else 'FAIL'}  {note}")
