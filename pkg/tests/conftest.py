import pytest

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label, title): exit criterion")


def pytest_runtest_logreport(report):
    if "acceptance" not in report.keywords:
        return
    props = dict(report.user_properties)
    key = props.get("criterion")
    if key is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        _ACCEPTANCE[key] = (status, props.get("title", ""), props.get("detail", ""))


@pytest.fixture
def criterion(request, record_property):
    marker = request.node.get_closest_marker("acceptance")
    record_property("criterion", marker.args[0])
    record_property("title", marker.args[1])
    return lambda detail: record_property("detail", detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: (int("".join(c for c in k if c.isdigit())), k)):
        status, title, detail = _ACCEPTANCE[key]
        line = f"[{status}] {key:>3} {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
