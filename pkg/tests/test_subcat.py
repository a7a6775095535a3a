import random

import pytest
from hypothesis import given, settings, strategies as st

from torsionlab.errors import CapExceeded, ConfigError
from torsionlab.hereditary import f_w, t_w
from torsionlab.modules import cyclic_module, direct_sum, free_module
from torsionlab.rings import SpecClosedSet, enumerate_ideals
from torsionlab.subcat import BRUTE_CAP, GENERATED, Calculus, Subcategory
from torsionlab.universe import Tables, mask_of

from oracles import brute_counts


def classes_z6(U):
    R = U.ring
    ideals = {I.label(): I for I in enumerate_ideals(R)}
    z2 = U.class_of(cyclic_module(R, ideals["(2)"]))
    z3 = U.class_of(cyclic_module(R, ideals["(3)"]))
    z6 = U.class_of(free_module(R))
    z22 = U.class_of(direct_sum(cyclic_module(R, ideals["(2)"]), cyclic_module(R, ideals["(2)"])))
    return z2, z3, z6, z22


def W(U, *labels):
    lab = U.ring.spectrum.labels()
    return SpecClosedSet.of(U.ring.spectrum, [lab.index(x) for x in labels])


def test_subcategory_wrapper():
    s = Subcategory.of([2, 3])
    assert s.indices() == [0, 2, 3] and 2 in s and 1 not in s
    assert Subcategory(1) <= s
    with pytest.raises(ValueError):
        Subcategory(2)


def test_ext_product_examples(z6):
    U, C = z6
    z2, z3, z6_, _ = classes_z6(U)
    A, B = 1 | 1 << z2, 1 | 1 << z3
    assert C.ext_product(1, B) == B
    assert C.ext_product(A, B) == A | B | 1 << z6_
    tv, tw = t_w(U, W(U, "(2)")), t_w(U, W(U, "(3)"))
    assert C.ext_product(tv, tw) == t_w(U, W(U, "(2)", "(3)")) == C.full


def test_perps(z6):
    U, C = z6
    assert C.left_perp(1) == C.full
    assert C.left_perp(C.full) == 1
    assert C.left_perp(t_w(U, W(U, "(3)"))) == t_w(U, W(U, "(2)"))


def test_closure_predicates(z4, z6):
    U, C = z6
    z2, _, z6_, _ = classes_z6(U)
    assert C.is_closed_sub(C.full) and C.is_closed_quot(C.full) and C.is_closed_ext(C.full)
    assert not C.is_closed_sub(1 | 1 << z6_)
    U4, C4 = z4
    k = U4.class_of(cyclic_module(U4.ring, enumerate_ideals(U4.ring)[1]))
    assert not C4.is_closed_ext(1 | 1 << k)
    assert C.is_serre(1) and C.is_serre(C.full) and C.is_serre(t_w(U, W(U, "(2)")))


def test_serre_closure(z6):
    U, C = z6
    assert C.serre_closure(1) == 1
    assert C.serre_closure(C.full) == C.full
    z2, z3, _, _ = classes_z6(U)
    assert C.serre_closure(1 << z2) == t_w(U, W(U, "(2)"))
    S = C.serre_closure(1 << z2 | 1 << z3)
    assert C.serre_closure(S) == S == C.full


def test_enumeration_counts_match_oracle(any_world):
    U, C = any_world
    serre, tts = brute_counts(U)
    assert sorted(mask_of(s) for s in serre) == sorted(C.enumerate_serre())
    got = {p.as_tuple() for p in C.enumerate_torsion_theories()}
    assert got == {(mask_of(x), mask_of(y)) for x, y in tts}


def test_known_counts(z4, z6):
    assert len(z6[1].enumerate_serre()) == 4
    assert len(z6[1].enumerate_torsion_theories()) == 4
    assert len(z4[1].enumerate_serre()) == 2
    assert len(z4[1].enumerate_torsion_theories()) == 2


def test_generated_mode_agrees_here(any_world):
    U, C = any_world
    gens = sorted(set(U.cyclic_classes()) | set(U.simple_classes()))
    assert C.enumerate_serre(GENERATED, U.simple_classes()) == C.enumerate_serre()
    assert C.enumerate_torsion_theories(GENERATED, gens) == C.enumerate_torsion_theories()
    for S in C.enumerate_serre():
        assert C.enumerate_s_torsion_theories(S, GENERATED, gens) == C.enumerate_s_torsion_theories(S)


def test_torsion_theory_examples(z6):
    U, C = z6
    w = W(U, "(2)")
    for X, Y in [(1, C.full), (C.full, 1), (t_w(U, w), f_w(U, w))]:
        assert C.is_torsion_theory_hom(X, Y) and C.is_torsion_theory_remark(X, Y)


def test_characterizations_agree_on_random_pairs(any_world):
    U, C = any_world
    rng = random.Random(7)
    for _ in range(400):
        X = rng.getrandbits(U.n) | 1
        Y = C.right_perp(X) if rng.random() < 0.5 else rng.getrandbits(U.n) | 1
        assert C.is_torsion_theory_hom(X, Y) == C.is_torsion_theory_remark(X, Y)


def test_s_operators(z6):
    U, C = z6
    S = t_w(U, W(U, "(2)"))
    F = rng_subcat(U, 3)
    assert C.s_left(F, C.full) == C.full
    assert C.s_left(F, 1) == C.left_perp(F)
    assert C.s_left(C.full, S) == S
    assert C.is_s_torsion_theory(S, C.full, S)
    assert C.is_s_torsion_theory(C.full, C.full, C.full)
    with pytest.raises(ConfigError):
        C.s_left(F, 1 | 1 << 4)


def rng_subcat(U, seed):
    return random.Random(seed).getrandbits(U.n) | 1


def test_s_torsion_enumeration(any_world):
    U, C = any_world
    zero_heart = {s.as_tuple() for s in C.enumerate_s_torsion_theories(1)}
    assert zero_heart == {p.as_tuple() for p in C.enumerate_torsion_theories()}
    assert [s.as_tuple() for s in C.enumerate_s_torsion_theories(C.full)] == [(C.full, C.full)]
    for S in C.enumerate_serre():
        for st_ in C.enumerate_s_torsion_theories(S):
            assert st_.certified
            assert C.heart_check(st_.t, st_.f, S) == S
            if S == 1:
                assert C.is_torsion_theory_hom(st_.t, st_.f)


def test_s_torsion_example_z6(z6):
    U, C = z6
    S = t_w(U, W(U, "(2)"))
    assert (S, C.full) in {s.as_tuple() for s in C.enumerate_s_torsion_theories(S)}


def test_canonicity_examples(z4, z6):
    U, C = z6
    z2, z3, _, _ = classes_z6(U)
    assert not C.is_canonical(1 | 1 << z2, 1 | 1 << z3)
    S = t_w(U, W(U, "(2)"))
    assert C.is_left_canonical(S, C.full, S) and C.is_right_canonical(S, C.full, S)
    for p in C.enumerate_torsion_theories():
        assert C.is_canonical(p.torsion, p.free)
        assert C.is_left_canonical(p.torsion, p.free, 1) and C.is_right_canonical(p.torsion, p.free, 1)
    U4, C4 = z4
    assert C4.is_left_canonical(C4.full, C4.full, C4.full)


def test_brute_cap():
    n = BRUTE_CAP + 1
    tables = Tables(n, [1 | 1 << i for i in range(n)], [1 | 1 << i for i in range(n)],
                    [{0: 1 << i, i: 1} for i in range(n)])
    with pytest.raises(CapExceeded):
        Calculus(tables).enumerate_serre()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**14 - 1), st.integers(0, 2**14 - 1), st.integers(0, 2**14 - 1))
def test_lattice_identities_z6(a, b, c):
    from conftest import world

    U, C = world("z6")
    A, B, D = a | 1, b | 1, c | 1
    # C and its left orthogonal share only zero
    assert A & C.left_perp(A) == 1
    assert C.ext_product(1, A) == A == C.ext_product(A, 1)
    assert C.ext_product(A, B) & C.ext_product(A | D, B | D) == C.ext_product(A, B)
    for S in C.enumerate_serre():
        L = C.s_left(A, S)
        assert C.s_left(C.s_right(L, S), S) == L
        assert C.s_left(A | B, S) & ~C.s_left(A, S) == 0
        assert C.s_right(A | B, S) & ~C.s_right(A, S) == 0
