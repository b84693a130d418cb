"""Acceptance criteria 1-12; each prints one PASS/FAIL line."""

import pytest

from rainbow_nibble import acceptance


@pytest.fixture(scope="module")
def suite():
    return acceptance.Suite()


@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number, suite, capsys):
    result = acceptance.CRITERIA[number](suite)
    with capsys.disabled():
        print("\n" + result.line(), flush=True)
    assert result.passed, result.line()
