import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from hmquintic import counting, hmq


@pytest.fixture(scope="session")
def resolved():
    """Memoized resolved_count, shared across the whole run.

    The heavy scans (p = 83 takes about a minute) happen once; every test
    that needs a CountResult goes through this.
    """
    memo = {}

    def get(p, policy=counting.DEFAULT_POLICY):
        key = (p, policy)
        if key not in memo:
            memo[key] = counting.resolved_count(p, policy=policy)
        return memo[key]

    return get


@pytest.fixture(scope="session")
def census():
    memo = {}

    def get(p):
        if p not in memo:
            memo[p] = hmq.singular_census(p)
        return memo[p]

    return get
