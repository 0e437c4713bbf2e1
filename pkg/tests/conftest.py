import pytest

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" or "test_acceptance" not in item.nodeid:
        return
    doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
    _ACCEPTANCE[item.nodeid] = (doc, report.outcome)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for nodeid in sorted(_ACCEPTANCE):
        doc, outcome = _ACCEPTANCE[nodeid]
        word = "PASS" if outcome == "passed" else "FAIL"
        markup = {"green": True} if outcome == "passed" else {"red": True, "bold": True}
        terminalreporter.write(f"{word} ", **markup)
        terminalreporter.line(doc)
