import contextlib

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@contextlib.contextmanager
def criterion(number: int, title: str):
    """Record PASS/FAIL for an acceptance criterion; the body asserts."""
    detail = {"text": ""}
    try:
        yield detail
    except BaseException:
        ACCEPTANCE[number] = (title, False, detail["text"])
        raise
    ACCEPTANCE[number] = (title, True, detail["text"])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, text = ACCEPTANCE[number]
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  ({text})" if text else ""))
