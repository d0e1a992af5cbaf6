"""Acceptance gate: every shipping criterion at its stated tolerance.

Each test prints one PASS/FAIL line (visible with pytest -s or in the
captured output of a failed run) and asserts the criterion's own pass
flag.  The same suites back the ``jmatrix verify`` CLI command.
"""

import pytest

from jmatrix.verify import SUITES


@pytest.mark.parametrize("name", list(SUITES), ids=list(SUITES))
def test_criterion(name):
    result = SUITES[name]()
    print(f"{'PASS' if result.passed else 'FAIL'}  {result.name}: {result.detail}")
    assert result.passed, f"{result.name}: {result.detail}"
