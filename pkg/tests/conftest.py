import re

_CRITERION = re.compile(r"test_acceptance\.py::test_c(\d+)_(\w+)")
_results: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    k = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _results[k] = ("PASS" if report.passed else "FAIL", m.group(2))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_results):
        verdict, name = _results[k]
        terminalreporter.write_line(f"criterion {k:2d} {verdict}  {name}")
