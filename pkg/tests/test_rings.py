import itertools

import pytest
from hypothesis import given, settings, strategies as st

from torsionlab.errors import CapExceeded, ConfigError
from torsionlab.rings import (
    SpecPoset,
    enumerate_ideals,
    has_zero_divisors,
    ideal_from_elements,
    is_field,
    is_local,
    is_prime_ideal,
    make_poly_quotient,
    make_product,
    make_zmod,
    parse_ring_spec,
    quotient_ring,
    rings_isomorphic,
    spec,
    spec_closed_sets,
    unit_ideal,
)


def labels(ideals):
    return [I.label() for I in ideals]


def test_zmod_basics():
    R = make_zmod(6)
    assert R.invariant_factors == (6,) and R.unit == (1,)
    assert is_field(make_zmod(2))


def test_ring_cap():
    with pytest.raises(CapExceeded):
        make_zmod(512)
    assert make_zmod(512, cap=1024).order == 512


def test_poly_quotients():
    R = make_poly_quotient(2, [0, 0, 1])
    assert R.order == 4 and not is_field(R)
    assert is_field(make_poly_quotient(2, [1, 1, 1]))
    assert make_poly_quotient(3, [0, 0, 1]).order == 9
    with pytest.raises(ConfigError):
        make_poly_quotient(4, [0, 1])
    with pytest.raises(ConfigError):
        make_poly_quotient(2, [0, 1, 0])


def test_products():
    P = make_product(make_zmod(2), make_zmod(3))
    assert rings_isomorphic(P, make_zmod(6))
    F = make_product(make_zmod(2), make_zmod(2))
    assert F.order == 4 and is_local(F) is None
    assert not rings_isomorphic(F, make_zmod(4))
    with pytest.raises(ConfigError):
        make_product(make_zmod(2), _zero_ring())


def _zero_ring():
    from torsionlab.rings import FiniteRing

    return FiniteRing((), (), ())


def test_ideals_of_zmod6():
    R = make_zmod(6)
    assert labels(enumerate_ideals(R)) == ["(0)", "(3)", "(2)", "(1)"]


def test_ideals_of_small_rings():
    assert labels(enumerate_ideals(make_zmod(4))) == ["(0)", "(2)", "(1)"]
    R = make_poly_quotient(2, [0, 0, 1])
    assert labels(enumerate_ideals(R)) == ["(0)", "(x)", "(1)"]


def test_prime_ideals():
    R = make_zmod(6)
    two = ideal_from_elements(R, [(2,)])
    zero = ideal_from_elements(R, [(0,)])
    assert is_prime_ideal(R, two) and not is_prime_ideal(R, zero)
    D = make_poly_quotient(2, [0, 0, 1])
    assert is_prime_ideal(D, ideal_from_elements(D, [(0, 1)]))
    assert not is_prime_ideal(R, unit_ideal(R))


def test_spec_and_locality():
    P = spec(make_zmod(6))
    assert sorted(P.labels()) == ["(2)", "(3)"] and P.is_antichain()
    assert is_local(make_zmod(6)) is None
    assert is_local(make_zmod(4)).label() == "(2)"
    assert is_local(make_poly_quotient(2, [0, 0, 1])).label() == "(x)"
    assert spec(make_product(make_zmod(2), make_zmod(2))).size == 2


def test_closed_sets_on_antichains():
    assert len(spec_closed_sets(spec(make_zmod(6)))) == 4
    assert len(spec_closed_sets(spec(make_zmod(4)))) == 2
    assert len(spec_closed_sets(spec(make_zmod(30)))) == 8


def test_closed_sets_on_a_chain():
    R = make_zmod(2)
    p = enumerate_ideals(R)
    chain = SpecPoset((p[0], p[1]), ((True, True), (False, True)))
    closed = spec_closed_sets(chain)
    assert [c.indices() for c in closed] == [[], [1], [0, 1]]
    assert not chain.is_antichain()


def test_quotient_rings():
    R = make_zmod(6)
    assert rings_isomorphic(quotient_ring(R, ideal_from_elements(R, [(2,)])), make_zmod(2))
    assert rings_isomorphic(quotient_ring(make_zmod(4), ideal_from_elements(make_zmod(4), [(2,)])), make_zmod(2))
    D = make_poly_quotient(2, [0, 0, 1])
    assert rings_isomorphic(quotient_ring(D, ideal_from_elements(D, [(0, 1)])), make_zmod(2))
    with pytest.raises(ValueError):
        quotient_ring(R, unit_ideal(R))


@pytest.mark.parametrize("text", ["zmod:6", "zmod:4", "polyq:2:0,0,1", "polyq:2:1,1,1", "prod:(zmod:2,zmod:3)",
                                  "prod:(zmod:2,prod:(zmod:2,zmod:3))", "polyq:3:0,0,1"])
def test_prime_test_agrees_with_quotient(text):
    R = parse_ring_spec(text)
    R.validate()
    for I in enumerate_ideals(R):
        if I.order == R.order:
            continue
        Q = quotient_ring(R, I)
        assert is_prime_ideal(R, I) == (not has_zero_divisors(Q))
    P = spec(R)
    assert P.is_antichain()
    assert len(spec_closed_sets(P)) == 2 ** P.size
    assert enumerate_ideals(R) == enumerate_ideals(R)


@pytest.mark.parametrize("bad,col", [("zmod:", 6), ("ring:4", 1), ("prod:(zmod:2", 13), ("zmod:6x", 7)])
def test_parse_errors_report_column(bad, col):
    with pytest.raises(ConfigError, match=f"column {col}"):
        parse_ring_spec(bad)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([2, 3]), st.lists(st.integers(0, 2), min_size=1, max_size=3))
def test_poly_quotient_axioms(p, low):
    coeffs = [c % p for c in low] + [1]
    R = make_poly_quotient(p, coeffs)
    R.validate()
    els = R.elements
    for x, y in itertools.islice(itertools.product(els, repeat=2), 200):
        assert R.mul(x, y) == R.mul(y, x)
        assert R.mul(R.unit, x) == x
