import contextlib

import pytest

_LINES: dict = {}


class _Record:
    detail = ""


@pytest.fixture
def criterion():
    """``with criterion(n, title) as rec:`` records a PASS/FAIL line for the summary."""

    @contextlib.contextmanager
    def run(n, title):
        rec = _Record()
        try:
            yield rec
        except BaseException as exc:
            _LINES[n] = f"criterion {n} ({title}): FAIL - {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
            print(_LINES[n])
            raise
        _LINES[n] = f"criterion {n} ({title}): PASS - {rec.detail}"
        print(_LINES[n])

    return run


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_LINES):
        terminalreporter.write_line(_LINES[n])
