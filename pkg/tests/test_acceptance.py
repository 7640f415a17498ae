"""The twelve acceptance criteria; each prints one PASS/FAIL line."""
import pytest

from rigidcalc.acceptance import CRITERIA, run_one

LINES = []


@pytest.mark.parametrize("number", [n for n, _, _ in CRITERIA],
                         ids=[f"AC{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(number):
    result = run_one(number)
    print(result.line())
    LINES.append(result.line())
    assert result.passed, result.detail


def test_criteria_are_complete():
    assert [n for n, _, _ in CRITERIA] == list(range(1, 13))
