from fractions import Fraction

import pytest

from mvop.families import FamilyCache
from mvop.weight import Params

# the parameter grid every suite-wide claim is exercised on
GRID = (
    Params(Fraction(1), Fraction(3)),
    Params(Fraction(1), Fraction(4)),
    Params(Fraction(2), Fraction(5)),
    Params(Fraction(3, 2), Fraction(7, 2)),
    Params(Fraction(5, 2), Fraction(6)),
    Params(Fraction(1), Fraction(2)),  # the reducible point
)

IRREDUCIBLE_GRID = tuple(p for p in GRID if not p.reducible)

_CACHES: dict[Params, FamilyCache] = {}


def family_cache(params: Params) -> FamilyCache:
    """Session-wide family caches; members are immutable once built."""
    if params not in _CACHES:
        _CACHES[params] = FamilyCache(params)
    return _CACHES[params]


@pytest.fixture(scope="session")
def grid():
    return GRID


@pytest.fixture(scope="session")
def base_params():
    return GRID[0]


@pytest.fixture(scope="session")
def base_family():
    return family_cache(GRID[0])
