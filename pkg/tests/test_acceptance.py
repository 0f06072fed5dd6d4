"""Acceptance criteria, one suite each, at the full desk-scale sizes.

Each test prints a PASS/FAIL line; the lines are repeated in the terminal
summary by ``conftest.py`` so they show up without ``-s``.
"""
import os

import pytest

from lfdgf.suites import run_suite

SEED = int(os.environ.get("LFDGF_SEED", "0"))

CRITERIA = [
    (1, "tr", None),
    (2, "tau", None),
    (3, "equisat-gf", None),
    (4, "sigma", None),
    (5, "setup", None),
    (6, "unravel", None),
    (7, "distinguish", None),
    (8, "roundtrip", None),
    (9, "size", None),
    (10, "fmp", 20),
]

LINES = []


@pytest.mark.parametrize("number,suite,n", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(number, suite, n):
    res = run_suite(suite, seed=SEED, n=n)
    line = f"criterion {number:2d}: {res.line()}"
    LINES.append(line)
    print(line)
    assert res.instances >= (20 if suite == "fmp" else 500)
    assert res.passed, res.failures[:5]
