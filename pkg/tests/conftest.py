"""Per-criterion pass/fail lines for the acceptance suite."""
import pytest

_RESULTS: dict[str, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(cid, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    cid, title = mark.args
    entry = _RESULTS.setdefault(cid, {"title": title, "ok": True, "seen": False})
    if rep.when == "call" or rep.failed:
        entry["seen"] = True
        entry["ok"] = entry["ok"] and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_RESULTS, key=lambda c: int(c[2:])):
        e = _RESULTS[cid]
        verdict = "PASS" if e["ok"] and e["seen"] else "FAIL"
        terminalreporter.write_line(f"{cid} {verdict}  {e['title']}")
