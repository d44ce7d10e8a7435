"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line (visible even under
output capture) and then asserts the criterion at its stated tolerance.
"""
import subprocess
import sys
import time

import pytest

from fraclap import selftest

# wall-clock limits for the two heavy criteria, in seconds
TIME_LIMITS = {1: 120.0, 6: 180.0}


@pytest.mark.parametrize("number", range(1, 9))
def test_criterion(number, capsys):
    check = selftest.CRITERIA[number - 1]
    start = time.perf_counter()
    result = check(0)
    elapsed = time.perf_counter() - start
    within = elapsed <= TIME_LIMITS.get(number, float("inf"))
    with capsys.disabled():
        print(f"\n{result.format_line()}" + ("" if within else f" (exceeded {TIME_LIMITS[number]:.0f} s)"))
    assert result.number == number
    assert result.passed, result.format_line()
    assert within, f"criterion {number} took {elapsed:.1f} s"


def test_selftest_cli_is_deterministic():
    cmd = [sys.executable, "-m", "fraclap.cli", "selftest", "--seed", "0"]
    first = subprocess.run(cmd, capture_output=True, check=False)
    second = subprocess.run(cmd, capture_output=True, check=False)
    assert first.returncode == 0, first.stderr.decode()
    assert first.stdout == second.stdout
    lines = first.stdout.decode().strip().splitlines()
    assert len(lines) == 8
    assert all(line.startswith("[PASS] criterion") for line in lines)
