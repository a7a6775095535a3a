import pytest

from torsionlab.rings import parse_ring_spec
from torsionlab.subcat import Calculus
from torsionlab.universe import build_universe

SUITE_RINGS = {"z4": ("zmod:4", 16), "z6": ("zmod:6", 36), "dual": ("polyq:2:0,0,1", 16)}

_cache: dict = {}


def world(key):
    if key not in _cache:
        spec, bound = SUITE_RINGS[key]
        U = build_universe(parse_ring_spec(spec), bound)
        _cache[key] = (U, Calculus(U.tables))
    return _cache[key]


@pytest.fixture(scope="session")
def z4():
    return world("z4")


@pytest.fixture(scope="session")
def z6():
    return world("z6")


@pytest.fixture(scope="session")
def dual():
    return world("dual")


@pytest.fixture(scope="session", params=sorted(SUITE_RINGS))
def any_world(request):
    return world(request.param)
