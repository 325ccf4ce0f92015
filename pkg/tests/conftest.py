"""Collects acceptance outcomes and prints one line per criterion."""

from collections import defaultdict

import pytest

_outcomes: dict[int, dict] = defaultdict(lambda: {"label": "", "tests": []})


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        number, label = marker.args
        slot = _outcomes[number]
        slot["label"] = label
        slot["tests"].append((item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.write_sep("=", "acceptance criteria")
    for number in sorted(_outcomes):
        slot = _outcomes[number]
        failed = [name for name, out in slot["tests"] if out != "passed"]
        verdict = "FAIL" if failed else "PASS"
        line = f"criterion {number:2d} {verdict}  {slot['label']}"
        if failed:
            line += f"  ({len(failed)}/{len(slot['tests'])} failed: {', '.join(failed)})"
        tr.write_line(line)
