"""Acceptance criteria 1-12, one test and one report line per criterion."""

import subprocess
import sys
import time

import pytest

from perturb3 import acceptance

# wall-clock limits stated by the criteria (seconds)
LIMITS = {1: 1.0, 2: 60.0, 7: 60.0}


def report(capsys, line):
    with capsys.disabled():
        print("\n" + line)


@pytest.mark.parametrize("number", range(1, 12), ids=lambda n: f"criterion-{n:02d}-{acceptance.NAMES[n][0]}")
def test_criterion(number, capsys):
    start = time.perf_counter()
    result = acceptance.CHECKS[number - 1](False)
    elapsed = time.perf_counter() - start
    report(capsys, result.line())
    assert result.number == number
    assert result.passed, result.detail
    if number in LIMITS:
        assert elapsed < LIMITS[number]


def test_criterion_12_determinism(capsys):
    cmd = [sys.executable, "-m", "perturb3", "selftest"]
    first = subprocess.run(cmd, capture_output=True, timeout=600)
    second = subprocess.run(cmd, capture_output=True, timeout=600)
    same = first.stdout == second.stdout and first.returncode == second.returncode == 0
    report(capsys, f"[{'PASS' if same else 'FAIL'}] 12 determinism: two selftest runs byte-identical")
    assert same
    assert first.stdout.decode().rstrip().endswith("12/12 checks passed")


def test_injected_bad_relation_is_caught():
    results = acceptance.run_checks("vassiliev", inject_bad_relation=True)
    assert [r.passed for r in results] == [False]
    assert results[0].name == "vassiliev-dimensions"
