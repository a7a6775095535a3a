import pytest

from torsionlab.hereditary import (
    OUTSIDE_HYPOTHESIS,
    check_lemma_orthogonal_vanish,
    check_lemma_stable_heart,
    example_triples,
    f_w,
    f_w_by_gamma,
    family_identity_violations,
    gabriel_check,
    hereditary_pairs,
    hull_class,
    residue_classes,
    stable_closure_check,
    t_w,
    t_w_by_gamma,
    verify_example,
)
from torsionlab.rings import SpecClosedSet, spec_closed_sets


def closed(U, *labels):
    lab = U.ring.spectrum.labels()
    return SpecClosedSet.of(U.ring.spectrum, [lab.index(x) for x in labels])


def test_z6_family_sizes(z6):
    U, C = z6
    W = closed(U, "(2)")
    T, F = t_w(U, W), f_w(U, W)
    assert bin(T).count("1") == 6 and bin(F).count("1") == 4
    assert T & F == 1
    assert C.is_torsion_theory(T, F)
    # 2-groups versus 3-groups
    assert all(U.order(c) & (U.order(c) - 1) == 0 for c in range(U.n) if T >> c & 1)
    assert all(U.order(c) % 2 for c in range(U.n) if F >> c & 1)


def test_extreme_sets(any_world):
    U, C = any_world
    empty = SpecClosedSet.of(U.ring.spectrum, [])
    everything = SpecClosedSet.of(U.ring.spectrum, range(U.ring.spectrum.size))
    assert (t_w(U, empty), f_w(U, empty)) == (1, C.full)
    assert (t_w(U, everything), f_w(U, everything)) == (C.full, 1)


def test_two_routes_agree(any_world):
    U, _ = any_world
    for W in spec_closed_sets(U.ring.spectrum):
        assert f_w_by_gamma(U, W) == f_w(U, W)
        assert t_w_by_gamma(U, W) == t_w(U, W)


def test_gabriel(any_world):
    U, C = any_world
    res = gabriel_check(U, C, C.enumerate_torsion_theories())
    assert res["holds"], res["problems"]
    assert res["hereditary_torsion_theories"] == res["expected"] == 2 ** U.ring.spectrum.size


def test_family_identities(any_world):
    U, C = any_world
    assert family_identity_violations(U, C) == []
    for W in spec_closed_sets(U.ring.spectrum):
        assert stable_closure_check(U, W)
        assert C.serre_closure(residue_classes(U, W)) == t_w(U, W)


def test_hereditary_pairs_are_distinct(z6):
    U, _ = z6
    pairs = hereditary_pairs(U)
    assert len(pairs) == len(set(pairs)) == 4


def test_hull_on_local_rings(z4, dual, z6):
    for U, _ in (z4, dual):
        E = hull_class(U)
        assert E is not None and U.order(E) == U.ring.order
    assert hull_class(z6[0]) is None


def test_hull_z4_is_cyclic_and_selfdual(z4):
    U, _ = z4
    E = hull_class(U)
    assert tuple(U.classes[E].invariant_factors) == (4,)
    assert U.dual[E] == E


@pytest.mark.parametrize("key", ["z4", "dual"])
def test_orthogonal_vanish(key):
    from conftest import world

    U, C = world(key)
    res = check_lemma_orthogonal_vanish(U, C)
    assert res["holds"] and res["tested"] >= 2 and res["failures"] == []


def test_orthogonal_vanish_skips_when_hull_missing(z4, z6):
    U, C = z4
    assert "skipped" in check_lemma_orthogonal_vanish(U, C, C=1)
    assert "skipped" in check_lemma_orthogonal_vanish(*z6)


def test_stable_heart(any_world):
    U, C = any_world
    for S in C.enumerate_serre():
        for stt in C.enumerate_s_torsion_theories(S):
            assert check_lemma_stable_heart(U, C, stt)["holds"]


def test_example_all_triples(any_world):
    U, C = any_world
    for V, W, Z in example_triples(U):
        rep = verify_example(U, C, V, W, Z)
        assert rep.failures == [], (V.label(), W.label(), Z.label(), rep.to_dict())


def test_example_degenerate_z4(z4):
    U, C = z4
    W = closed(U, U.ring.spectrum.labels()[0])
    empty = SpecClosedSet.of(U.ring.spectrum, [])
    rep = verify_example(U, C, empty, W, empty)
    assert rep.local and rep.failures == []
    assert rep.statements["3"].asserted and rep.statements["6b"].asserted
    assert rep.statements["6a"].detail["pair"] == [list(range(U.n)), list(range(U.n))]
    assert rep.statements["6b"].detail["pair"] == [[0], list(range(U.n))]


def test_example_z6_labels(z6):
    U, C = z6
    W = closed(U, "(2)")
    empty = SpecClosedSet.of(U.ring.spectrum, [])
    rep = verify_example(U, C, empty, W, empty)
    assert not rep.local and rep.failures == []
    assert rep.statements["6d"].detail["pair"] == [[0], list(range(U.n))]
    assert rep.statements["1"].label == OUTSIDE_HYPOTHESIS
    assert not rep.statements["3"].asserted and not rep.statements["6b"].asserted
    assert rep.to_dict()["failures"] == []


def test_example_requires_nonempty_w(z6):
    U, C = z6
    empty = SpecClosedSet.of(U.ring.spectrum, [])
    with pytest.raises(ValueError):
        verify_example(U, C, empty, empty, empty)
