import re

import pytest

# criterion number -> (passed, detail); filled by test_acceptance.record
ACCEPTANCE: dict[int, tuple[bool, str]] = {}
_OUTCOMES: dict[int, str] = {}
_CRITERION = re.compile(r"test_criterion_(\d+)_")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = _CRITERION.match(item.name)
    if m and (rep.when == "call" or rep.failed):
        n = int(m.group(1))
        if rep.failed or n not in _OUTCOMES:
            _OUTCOMES[n] = rep.outcome


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_OUTCOMES):
        passed, detail = ACCEPTANCE.get(n, (False, "did not complete (see traceback)"))
        ok = passed and _OUTCOMES[n] == "passed"
        tr.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
