"""Hereditary torsion theories from specialization-closed sets of primes.

For W closed under specialization, T_W holds the classes supported in W and
F_W the classes with no associated prime in W.  Also here: the checks that
need a local ring and its Matlis-dual hull, and the worked-example verifier.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .modules import cyclic_module, free_module, gamma_members, matlis_dual
from .rings import SpecClosedSet, is_local, spec_closed_sets
from .subcat import BRUTE_CAP, Calculus, STorsionTheory, TTPair
from .universe import Universe, bits, mask_of

OUTSIDE_HYPOTHESIS = "pattern holds outside stated hypothesis"
OUTSIDE_HYPOTHESIS_FAILS = "pattern fails outside stated hypothesis"


def t_w(U: Universe, W: SpecClosedSet) -> int:
    ws = frozenset(W.indices())
    return mask_of(c for c in range(U.n) if U.supp[c] <= ws)


def f_w(U: Universe, W: SpecClosedSet) -> int:
    ws = frozenset(W.indices())
    return mask_of(c for c in range(U.n) if not U.ass[c] & ws)


def f_w_by_gamma(U: Universe, W: SpecClosedSet) -> int:
    """Same class set as :func:`f_w`, computed from the torsion submodule instead."""
    return mask_of(c for c, M in enumerate(U.classes) if len(gamma_members(M, W)) == 1)


def t_w_by_gamma(U: Universe, W: SpecClosedSet) -> int:
    return mask_of(c for c, M in enumerate(U.classes) if len(gamma_members(M, W)) == M.order)


@dataclass(frozen=True)
class HereditaryTT:
    W: SpecClosedSet
    pair: TTPair
    serre_part: bool


def hereditary_tt(U: Universe, calc: Calculus, W: SpecClosedSet) -> HereditaryTT:
    T, F = t_w(U, W), f_w(U, W)
    return HereditaryTT(W, TTPair(T, F, certified=calc.is_torsion_theory(T, F)), calc.is_serre(T))


def hereditary_pairs(U: Universe) -> list[tuple[int, int]]:
    return [(t_w(U, W), f_w(U, W)) for W in spec_closed_sets(U.ring.spectrum)]


def residue_classes(U: Universe, W: SpecClosedSet) -> int:
    """Classes of R/p for p in W."""
    primes = U.ring.spectrum.primes
    return mask_of(U.class_of(cyclic_module(U.ring, primes[i])) for i in W.indices())


def gabriel_check(U: Universe, calc: Calculus, tts: list[TTPair]) -> dict:
    """Sub-closed torsion classes versus specialization-closed sets of primes."""
    closed = spec_closed_sets(U.ring.spectrum)
    from_w = {}
    problems = []
    for W in closed:
        h = hereditary_tt(U, calc, W)
        from_w[h.pair.as_tuple()] = W.label()
        if not h.pair.certified:
            problems.append(f"(T_W, F_W) not a torsion theory for W={W.label()}")
        if not h.serre_part:
            problems.append(f"T_W not Serre for W={W.label()}")
        gen = calc.serre_closure(residue_classes(U, W))
        if gen != h.pair.torsion:
            problems.append(f"T_W differs from the closure of its residue fields for W={W.label()}")
        if f_w_by_gamma(U, W) != h.pair.free:
            problems.append(f"F_W routes disagree for W={W.label()}")
        if t_w_by_gamma(U, W) != h.pair.torsion:
            problems.append(f"T_W routes disagree for W={W.label()}")
    hereditary = {tt.as_tuple() for tt in tts if calc.is_closed_sub(tt.torsion)}
    if len(from_w) != len(closed):
        problems.append("distinct W give the same torsion theory")
    if hereditary != set(from_w):
        problems.append("hereditary torsion theories do not match the specialization-closed sets")
    expected = 1 << U.ring.spectrum.size
    return {
        "spec_closed_sets": len(closed),
        "hereditary_torsion_theories": len(hereditary),
        "expected": expected,
        "holds": not problems and len(hereditary) == expected == len(closed),
        "problems": problems,
    }


def family_identity_violations(U: Universe, calc: Calculus) -> list[str]:
    """T_V * T_W = T_{V u W}, and monotonicity in W, for all V and W."""
    closed = spec_closed_sets(U.ring.spectrum)
    out = []
    for V, W in itertools.product(closed, repeat=2):
        if calc.ext_product(t_w(U, V), t_w(U, W)) != t_w(U, V | W):
            out.append(f"T_V * T_W != T_(V|W) for V={V.label()}, W={W.label()}")
        if V <= W:
            if t_w(U, V) & ~t_w(U, W) or f_w(U, W) & ~f_w(U, V):
                out.append(f"not monotone for V={V.label()}, W={W.label()}")
    return out


def stable_closure_check(U: Universe, W: SpecClosedSet) -> bool:
    """T_W is closed under essential extensions inside the universe."""
    T = t_w(U, W)
    for m in range(U.n):
        if U.tables.ess[m] & T & ~1 and not T >> m & 1:
            return False
    return True


# ---------------------------------------------------------------- local-ring lemmas


def hull_class(U: Universe) -> int | None:
    """Class of the Matlis dual of R (the hull of the residue field) on a local ring."""
    if is_local(U.ring) is None or U.ring.order > U.bound:
        return None
    return U.class_of(matlis_dual(free_module(U.ring)))


def check_lemma_orthogonal_vanish(U: Universe, calc: Calculus, C: int | None = None) -> dict:
    """^perp C = 0 whenever C holds the hull.  Without C, every such C is tried."""
    E = hull_class(U)
    if E is None:
        return {"skipped": "ring not local or hull exceeds bound", "holds": True}
    base = 1 | 1 << E
    if C is not None:
        if not C >> E & 1:
            return {"skipped": "hull not in C", "holds": True}
        candidates = [C]
    else:
        others = [c for c in range(1, U.n) if c != E]
        if len(others) + 2 > BRUTE_CAP:
            candidates = [base, calc.full]
        else:
            candidates = [base | mask_of(s) for k in range(len(others) + 1)
                          for s in itertools.combinations(others, k)]
    failures = [bits(c) for c in candidates if calc.left_perp(c) != 1]
    # operative content of stability: a nonzero Serre subcategory closed under
    # essential extensions contains the hull, hence has zero left orthogonal
    stable_failures = []
    for S in calc.enumerate_serre():
        if S == 1 or not _closed_under_essential(U, S):
            continue
        if not S >> E & 1 or calc.left_perp(S) != 1:
            stable_failures.append(bits(S))
    return {
        "hull_class": E,
        "tested": len(candidates),
        "failures": failures,
        "stable_failures": stable_failures,
        "holds": not failures and not stable_failures,
    }


def _closed_under_essential(U: Universe, S: int) -> bool:
    return all(not (U.tables.ess[m] & S & ~1) or S >> m & 1 for m in range(U.n))


def check_lemma_stable_heart(U: Universe, calc: Calculus, stt: STorsionTheory) -> dict:
    """With the hull in the heart: left canonical iff T equals the heart."""
    E = hull_class(U)
    if E is None or not stt.heart >> E & 1:
        return {"skipped": "hull hypothesis unmet", "holds": True}
    lc = calc.is_left_canonical(stt.t, stt.f, stt.heart)
    eq = stt.t == stt.heart
    return {"left_canonical": lc, "t_is_heart": eq, "holds": lc == eq}


# ---------------------------------------------------------------- worked example


@dataclass
class StatementResult:
    holds: bool
    asserted: bool
    label: str = ""
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"holds": self.holds, "asserted": self.asserted, "label": self.label, "detail": self.detail}


@dataclass
class ExampleReport:
    V: list[int]
    W: list[int]
    Z: list[int]
    local: bool
    statements: dict[str, StatementResult]

    @property
    def failures(self) -> list[str]:
        return [k for k, s in self.statements.items() if s.asserted and not s.holds]

    def to_dict(self) -> dict:
        return {
            "V": self.V,
            "W": self.W,
            "Z": self.Z,
            "local": self.local,
            "statements": {k: s.to_dict() for k, s in sorted(self.statements.items())},
            "failures": self.failures,
        }


def _p(pair) -> list[list[int]]:
    return [bits(pair[0]), bits(pair[1])]


def verify_example(U: Universe, calc: Calculus, V: SpecClosedSet, W: SpecClosedSet, Z: SpecClosedSet) -> ExampleReport:
    """Evaluate the six statements of the Gamma_W example for one (V, W, Z).

    Statements that need the hull hypothesis are only asserted when it holds;
    the rest are asserted on every ring and labelled when the ring is not local.
    """
    if not W.members:
        raise ValueError("W must be non-empty")
    local = is_local(U.ring) is not None
    X, Y = t_w(U, V), f_w(U, V)
    S = t_w(U, W)
    T, F = calc.ext_product(X, S), calc.ext_product(S, Y)
    TZ, FZ = t_w(U, Z), f_w(U, Z)
    Up, Vp = S & TZ, S & FZ
    E = hull_class(U)
    gate = local and E is not None and bool(S >> E & 1)
    plain_label = "" if local else OUTSIDE_HYPOTHESIS
    st: dict[str, StatementResult] = {}

    def plain(key, ok, **detail):
        label = plain_label if ok or local else OUTSIDE_HYPOTHESIS_FAILS
        st[key] = StatementResult(ok, True, label, detail)

    def gated(key, ok, **detail):
        if gate:
            st[key] = StatementResult(ok, True, "", detail)
        else:
            label = OUTSIDE_HYPOTHESIS if ok else OUTSIDE_HYPOTHESIS_FAILS
            st[key] = StatementResult(ok, False, "hypothesis unmet; " + label, detail)

    lc = calc.is_left_canonical(T, F, S)
    rc = calc.is_right_canonical(T, F, S)
    s_perp_f = calc.right_perp(S) & F
    left = (T & calc.left_perp(S), F)
    middle = (calc.ext_product(T & calc.left_perp(S), Up), calc.ext_product(Vp, s_perp_f))

    plain("1", calc.is_s_torsion_theory(T, F, S) and calc.is_canonical(T, F), pair=_p((T, F)))
    plain("2", rc and calc.is_torsion_theory(T, s_perp_f) and s_perp_f == Y & f_w(U, W),
          pair=_p((T, s_perp_f)))
    three = [calc.is_torsion_theory(*left), lc, T == S]
    gated("3", len(set(three)) == 1, verdicts=three)
    plain("4", calc.hom_vanishes(Up, Vp) and calc.ext_product(Up, Vp) == S, U=bits(Up), V=bits(Vp))
    plain("5", calc.is_torsion_theory(*middle) == lc, pair=_p(middle), left_canonical=lc)
    if V <= W and Z <= W:
        TW, FW = S, f_w(U, W)
        plain("6a", (T, F) == (TW, calc.full), pair=_p((T, F)))
        gated("6b", left == (1, calc.full), pair=_p(left))
        plain("6c", (T, s_perp_f) == (TW, FW), pair=_p((T, s_perp_f)))
        plain("6d", middle == (TZ, FZ) and calc.ext_product(TW & FZ, FW) == FZ, pair=_p(middle))
    return ExampleReport(V.indices(), W.indices(), Z.indices(), local, st)


def example_triples(U: Universe):
    closed = spec_closed_sets(U.ring.spectrum)
    for V, W, Z in itertools.product(closed, repeat=3):
        if W.members:
            yield V, W, Z
