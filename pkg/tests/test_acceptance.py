"""The verification gate: every exit criterion at its stated tolerance.

Each test runs one criterion and prints its one-line summary; the suite
passes only if every criterion passes.
"""

import pytest

from twistlab import acceptance


@pytest.mark.parametrize("criterion", acceptance.ALL_CRITERIA,
                         ids=[fn.__name__ for fn in acceptance.ALL_CRITERIA])
def test_criterion(criterion):
    result = criterion()
    print(result.line())
    assert result.passed, result.line()
