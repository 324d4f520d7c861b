"""Acceptance criteria, one test per criterion at the documented tolerance."""

import pytest

from freeconvb.checks import CRITERIA, run_criterion


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    result = run_criterion(number)
    print(result.line())
    assert result.passed, result.line()
