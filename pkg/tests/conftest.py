# Acceptance results are collected here and printed after the run, one line per criterion.
ACCEPTANCE: dict[int, tuple[str, bool, list[str]]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, notes = ACCEPTANCE[n]
        terminalreporter.line(f"criterion {n} [{'PASS' if ok else 'FAIL'}] {title}")
        for note in notes:
            terminalreporter.line(f"    {note}")
