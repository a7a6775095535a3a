"""The connection, the separations, and checkers for the mutation theorems.

Every checker recomputes the torsion-theory verdict for its left-hand side
from scratch through both characterizations; nothing is trusted from an
earlier certification apart from the precondition on the input.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ConfigError, InvariantViolation, UncertifiedInput
from .subcat import Calculus, STorsionTheory, TTPair, _subset_key
from .universe import Tables, bits

EXHAUSTIVE_UV_CAP = 1 << 16
EXHAUSTIVE_UV_MAX_CLASSES = 14


@dataclass
class MutationReport:
    check: str
    instance: dict
    lhs: bool
    rhs: bool
    holds: bool
    pairs: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    seconds: float | None = None

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "check": self.check,
            "instance": self.instance,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "pairs": self.pairs,
            "notes": self.notes,
        }
        if timing and self.seconds is not None:
            d["seconds"] = round(self.seconds, 6)
        return d


def _pair(p: tuple[int, int]) -> list[list[int]]:
    return [bits(p[0]), bits(p[1])]


# ---------------------------------------------------------------- operators


def connection(calc: Calculus, S: int, X: int, Y: int) -> STorsionTheory:
    """(X * S, S * Y), re-verified as an S-torsion theory."""
    T, F = calc.ext_product(X, S), calc.ext_product(S, Y)
    return STorsionTheory(T, F, S, certified=calc.is_s_torsion_theory(T, F, S))


def left_separation(calc: Calculus, T: int, F: int, S: int) -> tuple[int, int]:
    return T & calc.left_perp(S), F


def right_separation(calc: Calculus, T: int, F: int, S: int) -> tuple[int, int]:
    return T, calc.right_perp(S) & F


def middle_separation(calc: Calculus, T: int, F: int, S: int, U: int, V: int) -> tuple[int, int]:
    if U & ~S or V & ~S:
        raise ConfigError("U and V must both lie inside the heart")
    return (
        calc.ext_product(T & calc.left_perp(S), U),
        calc.ext_product(V, calc.right_perp(S) & F),
    )


def _require(stt: STorsionTheory) -> None:
    if not stt.certified:
        raise UncertifiedInput("checker requires a certified S-torsion theory")


def _inst(stt: STorsionTheory, **extra) -> dict:
    d = {"T": bits(stt.t), "F": bits(stt.f), "S": bits(stt.heart)}
    for k, v in extra.items():
        d[k] = bits(v) if isinstance(v, int) else v
    return d


# ---------------------------------------------------------------- theorem checkers


def check_theorem_left(calc: Calculus, stt: STorsionTheory) -> MutationReport:
    _require(stt)
    T, F, S = stt.t, stt.f, stt.heart
    sep = left_separation(calc, T, F, S)
    lhs = calc.is_torsion_theory(*sep)
    rhs = calc.is_canonical(T, F) and calc.is_left_canonical(T, F, S)
    return MutationReport("theorem_left", _inst(stt), lhs, rhs, lhs == rhs, {"left": _pair(sep)})


def check_theorem_right(calc: Calculus, stt: STorsionTheory) -> MutationReport:
    _require(stt)
    T, F, S = stt.t, stt.f, stt.heart
    sep = right_separation(calc, T, F, S)
    lhs = calc.is_torsion_theory(*sep)
    rhs = calc.is_canonical(T, F) and calc.is_right_canonical(T, F, S)
    return MutationReport("theorem_right", _inst(stt), lhs, rhs, lhs == rhs, {"right": _pair(sep)})


def middle_conditions(calc: Calculus, stt: STorsionTheory, U: int, V: int) -> dict[str, bool]:
    T, F, S = stt.t, stt.f, stt.heart
    return {
        "canonical": calc.is_canonical(T, F),
        "left_canonical": calc.is_left_canonical(T, F, S),
        "right_canonical": calc.is_right_canonical(T, F, S),
        "hom_uv_vanishes": calc.hom_vanishes(U, V),
        "uv_product_is_heart": calc.ext_product(U, V) == S,
    }


def check_theorem_middle(calc: Calculus, stt: STorsionTheory, U: int, V: int) -> MutationReport:
    _require(stt)
    sep = middle_separation(calc, stt.t, stt.f, stt.heart, U, V)
    lhs = calc.is_torsion_theory(*sep)
    conds = middle_conditions(calc, stt, U, V)
    rhs = all(conds.values())
    rep = MutationReport("theorem_middle", _inst(stt, U=U, V=V), lhs, rhs, lhs == rhs, {"middle": _pair(sep)})
    # necessary conditions, one lemma each
    if lhs:
        for lemma, keys in (
            ("canonical_pair_lemma", ("canonical",)),
            ("canonical_heart_lemma", ("left_canonical", "right_canonical")),
            ("heart_torsion_pair_lemma", ("hom_uv_vanishes", "uv_product_is_heart")),
        ):
            if not all(conds[k] for k in keys):
                rep.holds = False
                rep.notes.append(f"{lemma} violated")
    return rep


def check_corollary_special(calc: Calculus, stt: STorsionTheory) -> MutationReport:
    _require(stt)
    T, F, S = stt.t, stt.f, stt.heart
    m_0s = middle_separation(calc, T, F, S, 1, S)
    m_s0 = middle_separation(calc, T, F, S, S, 1)
    left = left_separation(calc, T, F, S)
    right = right_separation(calc, T, F, S)
    lc = calc.is_left_canonical(T, F, S)
    rc = calc.is_right_canonical(T, F, S)
    verdicts = [
        calc.is_torsion_theory(*m_0s),
        calc.is_torsion_theory(*m_s0),
        calc.is_torsion_theory(*left) and rc,
        calc.is_torsion_theory(*right) and lc,
        calc.is_canonical(T, F) and lc and rc,
    ]
    holds = len(set(verdicts)) == 1
    notes = []
    if holds and verdicts[0]:
        if m_0s != left:
            holds = False
            notes.append("middle (heart, 0, heart) differs from the left mutation")
        if m_s0 != right:
            holds = False
            notes.append("middle (heart, heart, 0) differs from the right mutation")
    rep = MutationReport(
        "corollary_special", _inst(stt), verdicts[0], verdicts[4], holds,
        {"middle_0S": _pair(m_0s), "middle_S0": _pair(m_s0), "left": _pair(left), "right": _pair(right)},
        notes,
    )
    rep.instance["verdicts"] = verdicts
    return rep


def _connection_checked(calc: Calculus, tt: TTPair, S: int):
    if not tt.certified:
        raise UncertifiedInput("checker requires a certified torsion theory")
    phi = connection(calc, S, tt.torsion, tt.free)
    notes = []
    if not phi.certified:
        notes.append("connection failed S-torsion theory re-verification")
    if not calc.is_canonical(phi.t, phi.f):
        notes.append("connection is not canonical")
    if phi.t & phi.f != S:
        notes.append("connection heart differs from S")
    return phi, notes


def _tt_inst(tt: TTPair, S: int, **extra) -> dict:
    d = {"X": bits(tt.torsion), "Y": bits(tt.free), "S": bits(S)}
    d.update({k: bits(v) for k, v in extra.items()})
    return d


def check_corollary_connection_left(calc: Calculus, tt: TTPair, S: int) -> MutationReport:
    phi, notes = _connection_checked(calc, tt, S)
    sep = left_separation(calc, phi.t, phi.f, S)
    lhs = calc.is_torsion_theory(*sep)
    rhs = calc.is_left_canonical(phi.t, phi.f, S)
    return MutationReport("corollary_connection_left", _tt_inst(tt, S), lhs, rhs,
                          lhs == rhs and not notes,
                          {"connection": _pair(phi.as_tuple()), "cl": _pair(sep)}, notes)


def check_corollary_connection_right(calc: Calculus, tt: TTPair, S: int) -> MutationReport:
    phi, notes = _connection_checked(calc, tt, S)
    sep = right_separation(calc, phi.t, phi.f, S)
    lhs = calc.is_torsion_theory(*sep)
    rhs = calc.is_right_canonical(phi.t, phi.f, S)
    return MutationReport("corollary_connection_right", _tt_inst(tt, S), lhs, rhs,
                          lhs == rhs and not notes,
                          {"connection": _pair(phi.as_tuple()), "cr": _pair(sep)}, notes)


def check_corollary_connection_middle(calc: Calculus, tt: TTPair, S: int, U: int, V: int) -> MutationReport:
    phi, notes = _connection_checked(calc, tt, S)
    sep = middle_separation(calc, phi.t, phi.f, S, U, V)
    lhs = calc.is_torsion_theory(*sep)
    rhs = (
        calc.is_left_canonical(phi.t, phi.f, S)
        and calc.is_right_canonical(phi.t, phi.f, S)
        and calc.hom_vanishes(U, V)
        and calc.ext_product(U, V) == S
    )
    return MutationReport("corollary_connection_middle", _tt_inst(tt, S, U=U, V=V), lhs, rhs,
                          lhs == rhs and not notes,
                          {"connection": _pair(phi.as_tuple()), "cm": _pair(sep)}, notes)


# ---------------------------------------------------------------- invariants


def heart_lemma_violations(calc: Calculus, stt: STorsionTheory) -> list[str]:
    """Identities every S-torsion theory satisfies; returns the names that fail."""
    T, F, S = stt.t, stt.f, stt.heart
    out = []
    if calc.ext_product(T, S) != T:
        out.append("T = T*S")
    if calc.ext_product(S, F) != F:
        out.append("F = S*F")
    if T & F != S:
        out.append("T & F = S")
    if S & ~T or S & ~F:
        out.append("S inside T and F")
    if calc.left_canonical_product(T, S) & ~T:
        out.append("left canonical product inside T")
    if calc.right_canonical_product(F, S) & ~F:
        out.append("right canonical product inside F")
    return out


def zero_heart_identity_violations(calc: Calculus, tt: TTPair) -> list[str]:
    """With heart {0} the connection and all separations act as the identity."""
    X, Y = tt.torsion, tt.free
    out = []
    phi = connection(calc, 1, X, Y)
    if phi.as_tuple() != (X, Y):
        out.append("connection")
    if left_separation(calc, X, Y, 1) != (X, Y):
        out.append("left")
    if right_separation(calc, X, Y, 1) != (X, Y):
        out.append("right")
    if middle_separation(calc, X, Y, 1, 1, 1) != (X, Y):
        out.append("middle")
    return out


# ---------------------------------------------------------------- sweep


def uv_family(S: int, hereditary_pairs: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    fam = {(S & tz, S & fz) for tz, fz in hereditary_pairs}
    fam.add((1, S))
    fam.add((S, 1))
    return sorted(fam, key=lambda p: (_subset_key(p[0]), p[1]))


def exhaustive_uv(S: int) -> list[tuple[int, int]] | None:
    """All (U, V) inside S, or None when the pair count is over the cap."""
    free = [c for c in bits(S) if c]
    if (1 << len(free)) ** 2 > EXHAUSTIVE_UV_CAP:
        return None
    subs = []
    for k in range(len(free) + 1):
        for combo in itertools.combinations(free, k):
            m = 1
            for c in combo:
                m |= 1 << c
            subs.append(m)
    subs.sort(key=_subset_key)
    return [(u, v) for u in subs for v in subs]


@dataclass
class SweepOptions:
    serre: list[int]
    torsion_theories: list[TTPair]
    hereditary_pairs: list[tuple[int, int]]
    mode: str = "brute"
    generators: list[int] = field(default_factory=list)
    exhaustive: bool = False
    jobs: int = 1
    timing: bool = False
    checks: tuple[str, ...] = ("theorems", "corollaries", "connections", "lemmas")


@dataclass
class SweepResult:
    reports: list[MutationReport]
    anomalies: list[dict]
    counts: dict

    @property
    def counterexamples(self) -> int:
        return sum(not r.holds for r in self.reports)


def _timed(fn, opts: SweepOptions, *args):
    t0 = time.perf_counter()
    rep = fn(*args)
    if opts.timing:
        rep.seconds = time.perf_counter() - t0
    return rep


def _sweep_one_heart(calc: Calculus, S: int, opts: SweepOptions):
    reports: list[MutationReport] = []
    anomalies: list[dict] = []
    counts = {"s_torsion_theories": 0, "canonical": 0, "non_canonical": 0, "uv_pairs": 0,
              "exhaustive_uv_skipped": 0}
    stts = calc.enumerate_s_torsion_theories(S, opts.mode, opts.generators)
    fam = uv_family(S, opts.hereditary_pairs)
    if opts.exhaustive:
        everything = exhaustive_uv(S) if calc.n <= EXHAUSTIVE_UV_MAX_CLASSES else None
        if everything is None:
            counts["exhaustive_uv_skipped"] += 1
        else:
            fam = everything
    counts["uv_pairs"] = len(fam)
    for stt in stts:
        counts["s_torsion_theories"] += 1
        if not stt.certified:
            anomalies.append({"kind": "uncertified_enumerated_pair", "instance": _inst(stt)})
            continue
        counts["canonical" if calc.is_canonical(stt.t, stt.f) else "non_canonical"] += 1
        if "lemmas" in opts.checks:
            bad = heart_lemma_violations(calc, stt)
            if bad:
                anomalies.append({"kind": "heart_lemma", "instance": _inst(stt), "failed": bad})
        if "theorems" in opts.checks:
            reports.append(_timed(check_theorem_left, opts, calc, stt))
            reports.append(_timed(check_theorem_right, opts, calc, stt))
            for U, V in fam:
                reports.append(_timed(check_theorem_middle, opts, calc, stt, U, V))
        if "corollaries" in opts.checks:
            reports.append(_timed(check_corollary_special, opts, calc, stt))
    if "connections" in opts.checks:
        for tt in opts.torsion_theories:
            if S == 1 and "lemmas" in opts.checks:
                bad = zero_heart_identity_violations(calc, tt)
                if bad:
                    anomalies.append({"kind": "zero_heart_identity",
                                      "instance": _tt_inst(tt, S), "failed": bad})
            reports.append(_timed(check_corollary_connection_left, opts, calc, tt, S))
            reports.append(_timed(check_corollary_connection_right, opts, calc, tt, S))
            for U, V in fam:
                reports.append(_timed(check_corollary_connection_middle, opts, calc, tt, S, U, V))
    for X, Y in calc.divergences:
        anomalies.append({"kind": "characterization_divergence", "X": bits(X), "Y": bits(Y)})
    calc.divergences.clear()
    return reports, anomalies, counts


_WORKER_CALC: Calculus | None = None


def _worker_init(tables: Tables) -> None:
    global _WORKER_CALC
    _WORKER_CALC = Calculus(tables)


def _worker_run(args):
    S, opts = args
    return _sweep_one_heart(_WORKER_CALC, S, opts)


def sweep(calc: Calculus, opts: SweepOptions) -> SweepResult:
    """Run every checker over every heart, S-torsion theory and (U, V) pair."""
    if opts.jobs > 1 and len(opts.serre) > 1:
        with ProcessPoolExecutor(opts.jobs, initializer=_worker_init, initargs=(calc.T,)) as ex:
            parts = list(ex.map(_worker_run, [(S, opts) for S in opts.serre]))
    else:
        parts = [_sweep_one_heart(calc, S, opts) for S in opts.serre]
    reports, anomalies = [], []
    counts = {"serre": len(opts.serre), "torsion_theories": len(opts.torsion_theories)}
    for rep, anom, c in parts:
        reports.extend(rep)
        anomalies.extend(anom)
        for k, v in c.items():
            counts[k] = counts.get(k, 0) + v
    counts["reports"] = len(reports)
    counts["counterexamples"] = sum(not r.holds for r in reports)
    counts["anomalies"] = len(anomalies)
    return SweepResult(reports, anomalies, counts)


def assert_clean(result: SweepResult) -> None:
    if result.counterexamples or result.anomalies:
        raise InvariantViolation(
            f"{result.counterexamples} counterexamples, {len(result.anomalies)} anomalies"
        )
