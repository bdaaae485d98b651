import pytest

_LINES = {}


@pytest.fixture(scope="session")
def report():
    """Record one pass/fail line per acceptance criterion and return the verdict."""

    def _report(key, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {title}" + (f" ({detail})" if detail else "")
        _LINES[key] = line
        print(line)
        return ok

    return _report


def _order(key):
    head, _, tail = str(key).partition(".")
    return (int(head) if head.isdigit() else 99, tail)


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(_LINES, key=_order):
        terminalreporter.write_line(_LINES[key])
