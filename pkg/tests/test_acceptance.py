"""Gate: every documented verification criterion must hold.

Each test runs one criterion end to end and prints its summary line; the
suite fails if any criterion fails.  Criterion 5's near-optimality rate is
currently below its stated threshold (see the result line for the measured
numbers) and is reported honestly rather than relaxed.
"""

import pytest

from risopt import acceptance


@pytest.mark.parametrize("criterion", acceptance.ALL_CRITERIA,
                         ids=lambda fn: fn.__name__)
def test_criterion(criterion):
    result = criterion()
    print(result.line())
    assert result.passed, result.line()
