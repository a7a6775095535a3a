"""Command-line entry point.

    torsionlab spec     --ring zmod:6
    torsionlab universe --ring zmod:6 --bound 36
    torsionlab list     serre --ring zmod:6 --bound 36
    torsionlab mutate   cr --ring zmod:6 --bound 36 --W 1 --V 1
    torsionlab verify   --ring zmod:4 --bound 16 --suite all
    torsionlab export-dot --ring zmod:6 --bound 36

Exit codes: 0 pass, 1 counterexample or invariant violation, 2 bad
configuration or a resource cap.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from dataclasses import dataclass, field, fields

from . import __version__
from .errors import ConfigError, IsomorphismUndecided, TorsionLabError
from .hereditary import (
    check_lemma_orthogonal_vanish,
    check_lemma_stable_heart,
    example_triples,
    family_identity_violations,
    f_w,
    gabriel_check,
    stable_closure_check,
    t_w,
    verify_example,
)
from .mutations import (
    MutationReport,
    SweepOptions,
    connection,
    left_separation,
    middle_separation,
    right_separation,
    sweep,
)
from .rings import DEFAULT_RING_CAP, SpecClosedSet, parse_ring_spec, spec_closed_sets
from .subcat import BRUTE, GENERATED, MODES, Calculus
from .universe import DEFAULT_BOUND_CAP, Universe, bits, build_universe, mask_of

log = logging.getLogger("torsionlab")

SUITES = ("tables", "theorems", "corollaries", "connections", "lemmas", "gabriel", "example", "local")
MUTATIONS = ("connection", "left", "right", "middle", "cl", "cr", "cm")
ANTICHAIN_NOTE = "finite ring: every prime is maximal, so the specialization order is trivial"


@dataclass
class RunConfig:
    ring: str = "zmod:6"
    bound: int = 36
    suite: str = "all"
    mode: str = BRUTE
    W: str = ""
    V: str = ""
    Z: str = ""
    out: str = ""
    dot: str = ""
    jobs: int = 1
    cap: int = DEFAULT_BOUND_CAP
    ring_cap: int = DEFAULT_RING_CAP
    exhaustive: bool = False
    timing: bool = False
    suites: tuple[str, ...] = field(default=(), repr=False)

    def validate(self) -> None:
        if self.bound < 1:
            raise ConfigError("bound must be at least 1")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        names = [s.strip() for s in self.suite.split(",") if s.strip()]
        if names == ["all"]:
            self.suites = SUITES
        else:
            unknown = [s for s in names if s not in SUITES]
            if unknown or not names:
                raise ConfigError(f"unknown suite {unknown or self.suite!r}; choose from all, {', '.join(SUITES)}")
            self.suites = tuple(s for s in SUITES if s in names)


_CONFIG_KEYS = {f.name for f in fields(RunConfig) if f.name != "suites"}


def load_config(path: str | None, overrides: dict) -> RunConfig:
    """Read ``[run]`` from an INI file, then apply the non-None command-line values."""
    values: dict = {}
    if path:
        parser = configparser.ConfigParser()
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if parser.has_section("run"):
            for key, raw in parser.items("run"):
                if key not in _CONFIG_KEYS:
                    raise ConfigError(f"{path}: unknown key {key!r} in [run]")
                values[key] = raw
    values.update({k: v for k, v in overrides.items() if v is not None and k in _CONFIG_KEYS})
    cfg = RunConfig()
    for f in fields(RunConfig):
        if f.name not in values:
            continue
        raw = values[f.name]
        try:
            if f.type in ("int", int):
                raw = int(raw)
            elif f.type in ("bool", bool):
                raw = raw if isinstance(raw, bool) else str(raw).lower() in ("1", "true", "yes", "on")
        except ValueError as exc:
            raise ConfigError(f"{f.name}: {exc}") from exc
        setattr(cfg, f.name, raw)
    cfg.validate()
    return cfg


def parse_closed_set(text: str, ring, flag: str) -> SpecClosedSet:
    P = ring.spectrum
    text = (text or "").strip()
    if text.lower() in ("", "none", "empty"):
        idx = []
    elif text.lower() in ("all", "spec"):
        idx = list(range(P.size))
    else:
        try:
            idx = [int(t) for t in text.split(",") if t.strip()]
        except ValueError as exc:
            raise ConfigError(f"--{flag}: expected comma separated prime indices, got {text!r}") from exc
    bad = [i for i in idx if not 0 <= i < P.size]
    if bad:
        raise ConfigError(f"--{flag}: prime index {bad[0]} out of range 0..{P.size - 1}")
    try:
        return SpecClosedSet.of(P, idx)
    except ValueError as exc:
        raise ConfigError(f"--{flag}: {exc}") from exc


def parse_pair(text: str, n: int) -> tuple[int, int]:
    """``"0,1,3;0,2"`` -> (mask, mask).  Class 0 is added to both sides."""
    try:
        left, right = text.split(";")
        masks = []
        for part in (left, right):
            idx = [int(t) for t in part.split(",") if t.strip()]
            if any(not 0 <= i < n for i in idx):
                raise ValueError("class index out of range")
            masks.append(mask_of(idx) | 1)
    except ValueError as exc:
        raise ConfigError(f"--pair: expected 'a,b;c,d' class indices: {exc}") from exc
    return masks[0], masks[1]


# ---------------------------------------------------------------- shared plumbing


class Context:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.ring = parse_ring_spec(cfg.ring, cfg.ring_cap)
        self.universe = build_universe(self.ring, cfg.bound, cfg.cap)
        self.calc = Calculus(self.universe.tables)

    @property
    def exhaustive(self) -> bool:
        return self.cfg.mode == BRUTE

    def generators(self) -> list[int]:
        return sorted(set(self.universe.cyclic_classes()) | set(self.universe.simple_classes()))

    def serre(self) -> list[int]:
        if self.cfg.mode == BRUTE:
            return self.calc.enumerate_serre(BRUTE)
        return self.calc.enumerate_serre(GENERATED, self.universe.simple_classes())

    def torsion_theories(self):
        return self.calc.enumerate_torsion_theories(self.cfg.mode, self.generators())

    def meta(self) -> dict:
        return {
            "ring": self.ring.name,
            "bound": self.cfg.bound,
            "mode": self.cfg.mode,
            "exhaustive": self.exhaustive,
            "version": __version__,
            "primes": self.ring.spectrum.labels(),
            "spec_antichain": self.ring.spectrum.is_antichain(),
            "note": ANTICHAIN_NOTE,
        }


def emit(text: str, path: str) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- commands


def cmd_spec(cfg: RunConfig) -> int:
    ring = parse_ring_spec(cfg.ring, cfg.ring_cap)
    P = ring.spectrum
    closed = spec_closed_sets(P)
    doc = {
        "ring": ring.name,
        "order": ring.order,
        "primes": [{"index": i, "ideal": lab} for i, lab in enumerate(P.labels())],
        "antichain": P.is_antichain(),
        "closed_sets": [c.indices() for c in closed],
        "counts": {"primes": P.size, "closed_sets": len(closed)},
        "note": ANTICHAIN_NOTE,
    }
    emit(dumps(doc), cfg.out)
    return 0


def cmd_universe(cfg: RunConfig) -> int:
    ctx = Context(cfg)
    doc = ctx.universe.to_dict()
    doc["meta"] = ctx.meta()
    doc["counts"] = {"classes": ctx.universe.n}
    emit(dumps(doc), cfg.out)
    return 0


def cmd_list(cfg: RunConfig, kind: str) -> int:
    ctx = Context(cfg)
    items = []
    if kind == "serre":
        items = [bits(S) for S in ctx.serre()]
    elif kind == "tt":
        items = [{"X": bits(p.torsion), "Y": bits(p.free), "certified": p.certified}
                 for p in ctx.torsion_theories()]
    elif kind == "stt":
        gens = ctx.generators()
        for S in ctx.serre():
            for st in ctx.calc.enumerate_s_torsion_theories(S, cfg.mode, gens):
                items.append({"S": bits(S), "T": bits(st.t), "F": bits(st.f), "certified": st.certified})
    doc = {"meta": ctx.meta(), "kind": kind, "count": len(items), "items": items}
    emit(dumps(doc), cfg.out)
    return 0


def cmd_mutate(cfg: RunConfig, which: str, pair_text: str | None) -> int:
    ctx = Context(cfg)
    U, calc = ctx.universe, ctx.calc
    V = parse_closed_set(cfg.V, ctx.ring, "V")
    W = parse_closed_set(cfg.W, ctx.ring, "W")
    Z = parse_closed_set(cfg.Z, ctx.ring, "Z")
    X, Y = t_w(U, V), f_w(U, V)
    S = t_w(U, W)
    Up, Vp = S & t_w(U, Z), S & f_w(U, Z)
    if not calc.is_torsion_theory(X, Y):
        raise ConfigError("the torsion theory chosen by --V does not certify")
    phi = connection(calc, S, X, Y)
    if pair_text and which in ("left", "right", "middle"):
        T, F = parse_pair(pair_text, U.n)
        if not calc.is_s_torsion_theory(T, F, S):
            raise ConfigError("--pair is not an S-torsion theory for the heart chosen by --W")
    else:
        T, F = phi.t, phi.f
    if which == "connection":
        result, certified = phi.as_tuple(), phi.certified
        clause = "connection of a torsion theory is a canonical S-torsion theory"
    else:
        if which in ("left", "cl"):
            result = left_separation(calc, T, F, S)
            rhs = calc.is_canonical(T, F) and calc.is_left_canonical(T, F, S)
            clause = "left mutation exists iff canonical with left canonical heart"
        elif which in ("right", "cr"):
            result = right_separation(calc, T, F, S)
            rhs = calc.is_canonical(T, F) and calc.is_right_canonical(T, F, S)
            clause = "right mutation exists iff canonical with right canonical heart"
        else:
            result = middle_separation(calc, T, F, S, Up, Vp)
            rhs = (calc.is_canonical(T, F) and calc.is_left_canonical(T, F, S)
                   and calc.is_right_canonical(T, F, S) and calc.hom_vanishes(Up, Vp)
                   and calc.ext_product(Up, Vp) == S)
            clause = "middle mutation exists iff canonical, both-sided canonical heart, Hom(U,V)=0 and U*V=S"
        certified = calc.is_torsion_theory(*result)
        clause += f" (condition side evaluates to {str(rhs).lower()})"
    doc = {
        "meta": ctx.meta(),
        "which": which,
        "selection": {"V": V.indices(), "W": W.indices(), "Z": Z.indices()},
        "input": {"X": bits(X), "Y": bits(Y), "S": bits(S), "T": bits(T), "F": bits(F),
                  "U": bits(Up), "V": bits(Vp)},
        "result": {"torsion": bits(result[0]), "free": bits(result[1])},
        "pair": f"{','.join(map(str, bits(result[0])))};{','.join(map(str, bits(result[1])))}",
        "certified": certified,
        "explained_by": clause,
    }
    emit(dumps(doc), cfg.out)
    return 0


def _table_sanity(U: Universe) -> list[dict]:
    T = U.tables
    out = []
    for c in range(U.n):
        for name, table in (("sub", T.sub), ("quot", T.quot)):
            if not table[c] & 1 or not table[c] >> c & 1:
                out.append({"kind": "table_sanity", "table": name, "class": c})
        for a, dmask in T.ext[c].items():
            for d in bits(dmask):
                if U.order(a) * U.order(d) != U.order(c):
                    out.append({"kind": "table_sanity", "table": "ext", "class": c, "sub": a, "quot": d})
        if T.ext[c].get(0, 0) != 1 << c or not T.ext[c].get(c, 0) & 1:
            out.append({"kind": "table_sanity", "table": "ext", "class": c, "reason": "trivial extensions"})
    return out


def _report(check: str, instance: dict, ok: bool, notes=None, pairs=None) -> MutationReport:
    return MutationReport(check, instance, ok, True, ok, pairs or {}, list(notes or []))


def run_verify(ctx: Context, timing: bool = False) -> dict:
    cfg, U, calc = ctx.cfg, ctx.universe, ctx.calc
    suites = cfg.suites
    reports: list[MutationReport] = []
    anomalies: list[dict] = []
    counts: dict = {"classes": U.n}
    if "tables" in suites:
        anomalies.extend(_table_sanity(U))
    serre = ctx.serre()
    tts = ctx.torsion_theories()
    counts["serre"] = len(serre)
    counts["torsion_theories"] = len(tts)
    closed = spec_closed_sets(ctx.ring.spectrum)
    counts["spec_closed_sets"] = len(closed)
    checks = tuple(s for s in ("theorems", "corollaries", "connections", "lemmas") if s in suites)
    if checks:
        opts = SweepOptions(serre, tts, [(t_w(U, W), f_w(U, W)) for W in closed], cfg.mode,
                            ctx.generators(), cfg.exhaustive, cfg.jobs, timing, checks)
        res = sweep(calc, opts)
        reports.extend(res.reports)
        anomalies.extend(res.anomalies)
        for k, v in res.counts.items():
            if k not in ("serre", "torsion_theories"):
                counts[k] = v
    if "lemmas" in suites and not ctx.exhaustive:
        counts["lemma_note"] = "generated mode: lemma checks cover generated pairs only"
    if "gabriel" in suites:
        g = gabriel_check(U, calc, tts) if ctx.exhaustive else None
        if g is not None:
            reports.append(_report("gabriel", {"closed_sets": g["spec_closed_sets"]}, g["holds"], g["problems"]))
            counts["hereditary_torsion_theories"] = g["hereditary_torsion_theories"]
        bad = family_identity_violations(U, calc)
        reports.append(_report("hereditary_family_identities", {}, not bad, bad))
        for W in closed:
            reports.append(_report("stable_closure", {"W": W.indices()}, stable_closure_check(U, W)))
    if "example" in suites:
        n_ex = 0
        for V, W, Z in example_triples(U):
            ex = verify_example(U, calc, V, W, Z)
            n_ex += 1
            notes = sorted({s.label for s in ex.statements.values() if s.label})
            reports.append(_report("example", {"V": ex.V, "W": ex.W, "Z": ex.Z,
                                               "statements": ex.to_dict()["statements"]},
                                   not ex.failures, notes + [f"failed {k}" for k in ex.failures]))
        counts["example_triples"] = n_ex
    if "local" in suites:
        lv = check_lemma_orthogonal_vanish(U, calc)
        reports.append(_report("lemma_orthogonal_vanish", {}, lv["holds"],
                               [lv["skipped"]] if "skipped" in lv else []))
        gens = ctx.generators()
        for S in serre:
            for st in calc.enumerate_s_torsion_theories(S, cfg.mode, gens):
                r = check_lemma_stable_heart(U, calc, st)
                if "skipped" in r:
                    continue
                reports.append(_report("lemma_stable_heart",
                                       {"T": bits(st.t), "F": bits(st.f), "S": bits(S)}, r["holds"]))
    for X, Y in calc.divergences:
        anomalies.append({"kind": "characterization_divergence", "X": bits(X), "Y": bits(Y)})
    calc.divergences.clear()
    counts["reports"] = len(reports)
    counts["counterexamples"] = sum(not r.holds for r in reports)
    counts["anomalies"] = len(anomalies)
    return {
        "meta": ctx.meta(),
        "counts": counts,
        "reports": [r.to_dict(timing) for r in reports],
        "anomalies": anomalies,
    }


def inject_fault(U: Universe) -> None:
    """Test hook: drop the largest class from its own submodule table."""
    c = U.n - 1
    U.tables.sub[c] &= ~(1 << c)


def cmd_verify(cfg: RunConfig, pair_text: str | None, heart_text: str | None, fault: bool) -> int:
    ctx = Context(cfg)
    if fault:
        inject_fault(ctx.universe)
        ctx.calc = Calculus(ctx.universe.tables)
    if pair_text:
        X, Y = parse_pair(pair_text, ctx.universe.n)
        if heart_text is not None:
            S = parse_pair(heart_text + ";", ctx.universe.n)[0]
            ok = ctx.calc.is_s_torsion_theory(X, Y, S)
            kind = "s_torsion_theory"
        else:
            S = 1
            ok = ctx.calc.is_torsion_theory(X, Y)
            kind = "torsion_theory"
        doc = {"meta": ctx.meta(), "instance": {"X": bits(X), "Y": bits(Y), "S": bits(S)},
               "kind": kind, "certified": ok}
        emit(dumps(doc), cfg.out)
        return 0 if ok else 1
    doc = run_verify(ctx, cfg.timing)
    emit(dumps(doc), cfg.out)
    c = doc["counts"]
    log.info("%d reports, %d counterexamples, %d anomalies", c["reports"], c["counterexamples"], c["anomalies"])
    return 1 if c["counterexamples"] or c["anomalies"] else 0


def dot_text(ctx: Context) -> str:
    U, calc = ctx.universe, ctx.calc
    tts = [p for p in ctx.torsion_theories() if p.certified]
    tts.sort(key=lambda p: (bin(p.torsion).count("1"), p.torsion))
    node = {p.as_tuple(): i for i, p in enumerate(tts)}
    serre = ctx.serre()
    closed = spec_closed_sets(ctx.ring.spectrum)
    lines = ["digraph torsion_classes {", "  rankdir=BT;", "  node [shape=box];"]
    for i, p in enumerate(tts):
        label = "{" + ",".join(map(str, bits(p.torsion))) + "}"
        lines.append(f'  t{i} [label="{label}"];')
    # Hasse edges of the inclusion order on torsion parts
    for i, a in enumerate(tts):
        for j, b in enumerate(tts):
            if i == j or a.torsion & ~b.torsion:
                continue
            between = any(k not in (i, j) and not a.torsion & ~c.torsion and not c.torsion & ~b.torsion
                          for k, c in enumerate(tts))
            if not between:
                lines.append(f"  t{i} -> t{j};")
    labels: dict[tuple[int, int], set[str]] = {}
    for src in tts:
        for s_idx, S in enumerate(serre):
            phi = connection(calc, S, src.torsion, src.free)
            if not phi.certified:
                continue
            cand = [("CL", left_separation(calc, phi.t, phi.f, S)),
                    ("CR", right_separation(calc, phi.t, phi.f, S))]
            for z_idx, Z in enumerate(closed):
                Up, Vp = S & t_w(U, Z), S & f_w(U, Z)
                cand.append((f"CM{z_idx}", middle_separation(calc, phi.t, phi.f, S, Up, Vp)))
            for name, res in cand:
                if res in node and res != src.as_tuple():
                    labels.setdefault((node[src.as_tuple()], node[res]), set()).add(f"{name}@S{s_idx}")
    for (i, j), names in sorted(labels.items()):
        lines.append(f'  t{i} -> t{j} [style=dashed, label="{" ".join(sorted(names))}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_export_dot(cfg: RunConfig) -> int:
    ctx = Context(cfg)
    emit(dot_text(ctx), cfg.dot or cfg.out)
    return 0


# ---------------------------------------------------------------- argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with a [run] section; flags override it")
    common.add_argument("--ring", help="ring spec, e.g. zmod:6, polyq:2:0,0,1, prod:(zmod:2,zmod:3)")
    common.add_argument("--bound", type=int, help="order bound B for the module universe")
    common.add_argument("--cap", type=int, help=f"largest admissible bound (default {DEFAULT_BOUND_CAP})")
    common.add_argument("--mode", choices=MODES, help="enumeration mode")
    common.add_argument("--W", help="comma separated prime indices (heart)")
    common.add_argument("--V", help="comma separated prime indices (torsion theory)")
    common.add_argument("--Z", help="comma separated prime indices (middle pair)")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--jobs", type=int, help="worker processes for the sweep")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="torsionlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("spec", parents=[common], help="list primes and specialization-closed sets")
    sub.add_parser("universe", parents=[common], help="dump the module universe as JSON")
    pl = sub.add_parser("list", parents=[common], help="list Serre subcategories or (S-)torsion theories")
    pl.add_argument("kind", choices=("serre", "tt", "stt"))
    pm = sub.add_parser("mutate", parents=[common], help="apply a connection or mutation")
    pm.add_argument("which", choices=MUTATIONS)
    pm.add_argument("--pair", help="S-torsion theory 'T;F' for left/right/middle (default: the connection)")
    pv = sub.add_parser("verify", parents=[common], help="run the verification suites")
    pv.add_argument("--suite", help="comma separated suites or 'all'")
    pv.add_argument("--exhaustive", action="store_true", default=None,
                    help="check every (U, V) pair inside each heart where the pair count allows")
    pv.add_argument("--timing", action="store_true", default=None, help="include per-check timings")
    pv.add_argument("--pair", help="single instance 'X;Y' to certify")
    pv.add_argument("--heart", help="heart class indices for --pair, making it an S-torsion theory check")
    pv.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    pd = sub.add_parser("export-dot", parents=[common], help="DOT lattice of torsion classes")
    pd.add_argument("--dot", help="write DOT here")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {k: v for k, v in vars(args).items() if k in _CONFIG_KEYS}
    try:
        cfg = load_config(args.config, overrides)
        if args.command == "spec":
            return cmd_spec(cfg)
        if args.command == "universe":
            return cmd_universe(cfg)
        if args.command == "list":
            return cmd_list(cfg, args.kind)
        if args.command == "mutate":
            return cmd_mutate(cfg, args.which, args.pair)
        if args.command == "verify":
            return cmd_verify(cfg, args.pair, args.heart, args.inject_fault)
        if args.command == "export-dot":
            return cmd_export_dot(cfg)
    except (ConfigError, IsomorphismUndecided) as exc:
        print(f"torsionlab: {exc}", file=sys.stderr)
        return 2
    except TorsionLabError as exc:
        print(f"torsionlab: invariant violation: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
