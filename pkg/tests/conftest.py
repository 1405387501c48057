"""Collects acceptance verdicts and prints one line per criterion at the end."""

_verdicts: dict[str, list[tuple[bool, str]]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        _verdicts.setdefault(props["criterion"], []).append((report.passed, props.get("detail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_verdicts, key=lambda c: int(c)):
        results = _verdicts[crit]
        ok = all(passed for passed, _ in results)
        details = "; ".join(d for _, d in results if d)
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}  {details}")
