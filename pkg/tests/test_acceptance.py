"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (the lines are repeated in the
terminal summary) or ``python tests/test_acceptance.py``.
"""

import functools

import pytest

from teamlab import acceptance

LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def _lecam():
    return acceptance.criterion_lecam()


CRITERIA = {
    "1-minimax": acceptance.criterion_minimax,
    "2-blackwell-forward": acceptance.criterion_blackwell_forward,
    "3-blackwell-converse": acceptance.criterion_blackwell_converse,
    "4a-lecam-forward": lambda: _lecam()[0],
    "4b-lecam-tightness": lambda: _lecam()[1],
    "5-tat-chain": acceptance.criterion_tat_chain,
    "6-continuity": acceptance.criterion_continuity,
    "7-example1": acceptance.criterion_example1,
    "8-ccr-roundtrip": acceptance.criterion_ccr,
    "9-single-player": acceptance.criterion_single_player,
}


@pytest.mark.acceptance
@pytest.mark.parametrize("key", list(CRITERIA))
def test_criterion(key):
    res = CRITERIA[key]()
    line = res.line()
    LINES.append(line)
    print(line)
    assert res.passed, line


if __name__ == "__main__":
    ok = True
    for key, fn in CRITERIA.items():
        r = fn()
        print(r.line())
        ok &= r.passed
    raise SystemExit(0 if ok else 1)
