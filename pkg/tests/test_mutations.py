import pytest

from torsionlab.errors import ConfigError, InvariantViolation, UncertifiedInput
from torsionlab.hereditary import f_w, hereditary_pairs, t_w
from torsionlab.mutations import (
    SweepOptions,
    assert_clean,
    check_corollary_connection_left,
    check_corollary_connection_middle,
    check_corollary_connection_right,
    check_corollary_special,
    check_theorem_left,
    check_theorem_middle,
    check_theorem_right,
    connection,
    exhaustive_uv,
    heart_lemma_violations,
    left_separation,
    middle_separation,
    right_separation,
    sweep,
    uv_family,
    zero_heart_identity_violations,
)
from torsionlab.rings import SpecClosedSet
from torsionlab.subcat import STorsionTheory, TTPair


def tw_fw(U, label):
    lab = U.ring.spectrum.labels()
    W = SpecClosedSet.of(U.ring.spectrum, [lab.index(label)])
    return t_w(U, W), f_w(U, W)


def options(U, C, **kw):
    return SweepOptions(C.enumerate_serre(), C.enumerate_torsion_theories(), hereditary_pairs(U), **kw)


def test_connection_z6(z6):
    U, C = z6
    T, F = tw_fw(U, "(2)")
    phi = connection(C, T, T, F)
    assert phi.certified and phi.as_tuple() == (T, C.full)
    assert left_separation(C, phi.t, phi.f, T) == (1, C.full)
    assert right_separation(C, phi.t, phi.f, T) == (T, F)
    assert C.is_torsion_theory(1, C.full) and C.is_torsion_theory(T, F)


def test_connection_middle_z4(z4):
    U, C = z4
    tt = TTPair(1, C.full, certified=True)
    phi = connection(C, C.full, 1, C.full)
    assert phi.as_tuple() == (C.full, C.full)
    assert middle_separation(C, phi.t, phi.f, C.full, C.full, 1) == (C.full, 1)
    rep = check_corollary_connection_middle(C, tt, C.full, C.full, 1)
    assert rep.lhs and rep.rhs and rep.holds
    assert rep.pairs["cm"] == [list(range(U.n)), [0]]


def test_separations_of_tt_family(any_world):
    U, C = any_world
    for tt in C.enumerate_torsion_theories():
        assert zero_heart_identity_violations(C, tt) == []


def test_uncertified_inputs_rejected(z6):
    U, C = z6
    bad = STorsionTheory(1, 1, 1, certified=False)
    for fn in (check_theorem_left, check_theorem_right, check_corollary_special):
        with pytest.raises(UncertifiedInput):
            fn(C, bad)
    with pytest.raises(UncertifiedInput):
        check_theorem_middle(C, bad, 1, 1)
    with pytest.raises(UncertifiedInput):
        check_corollary_connection_left(C, TTPair(1, 1), 1)


def test_middle_requires_uv_in_heart(z6):
    U, C = z6
    T, F = tw_fw(U, "(2)")
    stt = STorsionTheory(T, C.full, T, certified=True)
    with pytest.raises(ConfigError):
        middle_separation(C, T, C.full, T, C.full, 1)
    with pytest.raises(ConfigError):
        check_theorem_middle(C, stt, 1, C.full)


def test_single_checkers_z6(z6):
    U, C = z6
    T, F = tw_fw(U, "(2)")
    stt = STorsionTheory(T, C.full, T, certified=C.is_s_torsion_theory(T, C.full, T))
    assert stt.certified
    for rep in (check_theorem_left(C, stt), check_theorem_right(C, stt), check_corollary_special(C, stt)):
        assert rep.holds and rep.lhs and rep.rhs
    rep = check_theorem_middle(C, stt, 1, T)
    assert rep.holds and rep.pairs["middle"] == [[0], list(range(U.n))]
    tt = TTPair(T, F, certified=True)
    assert check_corollary_connection_left(C, tt, T).holds
    assert check_corollary_connection_right(C, tt, T).holds


def test_heart_lemmas_all_stts(any_world):
    U, C = any_world
    for S in C.enumerate_serre():
        for stt in C.enumerate_s_torsion_theories(S):
            assert heart_lemma_violations(C, stt) == []


def test_uv_family_contents(z6):
    U, C = z6
    S, _ = tw_fw(U, "(2)")
    fam = uv_family(S, hereditary_pairs(U))
    assert (1, S) in fam and (S, 1) in fam
    assert all(u & ~S == 0 and v & ~S == 0 for u, v in fam)
    assert exhaustive_uv(1) == [(1, 1)]
    assert len(exhaustive_uv(S)) == (1 << 5) ** 2
    assert exhaustive_uv(C.full) is None


@pytest.mark.parametrize("exhaustive", [False, True])
def test_sweep_clean(any_world, exhaustive):
    U, C = any_world
    res = sweep(C, options(U, C, exhaustive=exhaustive))
    assert res.counterexamples == 0 and res.anomalies == []
    assert res.counts["non_canonical"] == 0
    assert_clean(res)


def test_sweep_counts_z6(z6):
    U, C = z6
    res = sweep(C, options(U, C))
    assert res.counts["serre"] == 4
    assert res.counts["torsion_theories"] == 4
    assert res.counts["s_torsion_theories"] == 9
    assert res.counts["reports"] == 111


def test_sweep_parallel_matches_serial(z4):
    U, C = z4
    a = sweep(C, options(U, C))
    b = sweep(C, options(U, C, jobs=2))
    assert [r.to_dict() for r in a.reports] == [r.to_dict() for r in b.reports]
    assert a.counts == b.counts


def test_assert_clean_raises_on_failure(z4):
    U, C = z4
    res = sweep(C, options(U, C))
    res.reports[0].holds = False
    with pytest.raises(InvariantViolation):
        assert_clean(res)


def test_timing_only_when_requested(z4):
    U, C = z4
    res = sweep(C, options(U, C))
    assert all(r.seconds is None for r in res.reports)
    assert "seconds" not in res.reports[0].to_dict()
    timed = sweep(C, options(U, C, timing=True))
    assert all(r.seconds is not None for r in timed.reports)
