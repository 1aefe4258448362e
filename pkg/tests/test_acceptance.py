"""The twelve acceptance criteria at their stated tolerances.

Each test runs one criterion from :mod:`radnls.checks` with its default
(acceptance) settings, records a one-line PASS/FAIL verdict and asserts the
outcome.  The sweep criteria use large grids and take minutes each.
"""

import pytest

from radnls.checks import CRITERIA


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, acceptance_line):
    res = CRITERIA[number]()
    acceptance_line(f"{res.line()} [{res.seconds:.1f}s]")
    assert res.passed, res.line()
