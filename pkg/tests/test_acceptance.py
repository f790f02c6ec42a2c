"""Acceptance criteria 1-11, one test each.

Every test prints a single ``[PASS]``/``[FAIL]`` line with the measured
values; the lines are repeated in the terminal summary. Criteria whose stated
expectation disagrees with the measurement fail here on purpose; the analysis
is in the decisions ledger kept next to the repository.
"""
import pytest

from widthlab import reproduce

CRITERIA = {
    1: reproduce.criterion_1,
    2: reproduce.criterion_2,
    3: reproduce.criterion_3,
    4: reproduce.criterion_4,
    5: reproduce.criterion_5,
    6: reproduce.criterion_6,
    7: reproduce.criterion_7,
    8: reproduce.criterion_8,
    9: reproduce.criterion_9,
    10: reproduce.criterion_10,
    11: reproduce.criterion_11,
}

LINES: dict[int, str] = {}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    check = CRITERIA[number]()
    line = f"criterion {number:2d}: {check.line()}"
    LINES[number] = line
    print(line)
    for note in check.notes:
        print(f"    note: {note}")
    assert check.passed, "; ".join(check.notes) or str(check.measured)
