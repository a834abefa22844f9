"""One test per acceptance criterion, each printing a single PASS/FAIL line.

Also runnable directly: ``python3 tests/test_acceptance.py``.
"""

import sys

import pytest

from kltbench import acceptance


def summary_line(number, report):
    s = report.summary
    status = "PASS" if report.ok else "FAIL"
    title = report.command.split(": ", 1)[-1]
    line = f"criterion {number}: {status} ({s['pass']}/{s['total']} checks) {title}"
    failing = [f"{c.id} expected={c.expected} actual={c.actual}" for c in report.checks if c.status == "fail"]
    if failing:
        line += " | failing: " + "; ".join(failing)
    return line


@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number, capsys):
    report = acceptance.CRITERIA[number]()
    line = summary_line(number, report)
    with capsys.disabled():
        print("\n" + line)
    assert report.checks, "criterion ran no checks"
    assert report.ok, line


if __name__ == "__main__":
    ok = True
    for n, fn in sorted(acceptance.CRITERIA.items()):
        rep = fn()
        ok &= rep.ok
        print(summary_line(n, rep))
    sys.exit(0 if ok else 1)
