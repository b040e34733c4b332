"""The ten acceptance criteria, one test each; a summary line per criterion
is printed at the end of the session."""
import pytest

from magflow import acceptance

RESULTS = {}


@pytest.mark.parametrize("check", acceptance.CHECKS, ids=[f"criterion-{i + 1:02d}" for i in range(len(acceptance.CHECKS))])
def test_criterion(check):
    result = acceptance.run_check(check)
    RESULTS[result.id] = result
    print(result.line())
    assert result.passed, "\n".join(result.details)
