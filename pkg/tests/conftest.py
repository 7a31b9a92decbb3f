"""One PASS/FAIL line per acceptance criterion at the end of the run."""

RESULTS = {}


def record(n, ok, detail=""):
    RESULTS[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
