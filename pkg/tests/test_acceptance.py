"""Acceptance criteria 1-10, each at its stated tolerance.

Run ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
Every criterion prints a single PASS/FAIL summary line, plus the individual checks
behind it.
"""

import sys
import time

import pytest

from henonlab import verify

SUMMARY = []


def _report(k, checks, elapsed):
    title = verify.CRITERIA[k][0]
    ok = all(c.passed for c in checks)
    head = f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {title} ({len(checks)} checks, {elapsed:.1f}s)"
    lines = [head] + ["    " + c.line() for c in checks]
    return ok, "\n".join(lines)


@pytest.mark.parametrize("k", sorted(verify.CRITERIA))
def test_criterion(k, capsys):
    _, fn, _ = verify.CRITERIA[k]
    t0 = time.perf_counter()
    checks = fn()
    ok, text = _report(k, checks, time.perf_counter() - t0)
    with capsys.disabled():
        print("\n" + text)
    failed = [c.line() for c in checks if not c.passed]
    assert ok, "\n".join(failed)


def test_criterion_1_runtime():
    t0 = time.perf_counter()
    verify.criterion_1()
    assert time.perf_counter() - t0 < 60.0


if __name__ == "__main__":
    bad = 0
    for k in sorted(verify.CRITERIA):
        t0 = time.perf_counter()
        checks = verify.CRITERIA[k][1]()
        ok, text = _report(k, checks, time.perf_counter() - t0)
        print(text, flush=True)
        bad += not ok
    sys.exit(1 if bad else 0)
