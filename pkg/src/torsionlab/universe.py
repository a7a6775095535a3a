"""The closed world of finite modules up to an order bound.

Classes are built by one-generator extensions: every module M of order <= B
with a submodule M' and M / M' = R / I is the pushout

    (M' (+) R) / {(psi(r), -r) : r in I},     psi in Hom_R(I, M').

Starting from the zero module and iterating to a fixpoint therefore reaches
every isomorphism class (induct on the number of generators).
"""

from __future__ import annotations

import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

from .errors import CapExceeded, InvariantViolation
from .modules import (
    FiniteModule,
    ass,
    fingerprint,
    free_module,
    hom_group,
    is_isomorphic,
    matlis_dual,
    module_from_quotient,
    quotient_by,
    socle_members,
    submodule,
    submodule_sets,
    support,
)
from .rings import FiniteRing, enumerate_ideals

log = logging.getLogger(__name__)

DEFAULT_BOUND_CAP = 64


def bits(mask: int) -> list[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


@dataclass
class Tables:
    """Pure-integer view of a universe; everything the bitset calculus needs.

    ``ext[m]`` maps a submodule class c to the mask of quotient classes d
    realised by a submodule of class c in the representative of m.
    """

    n: int
    sub: list[int]
    quot: list[int]
    ext: list[dict[int, int]]
    ess: list[int] = field(default_factory=list)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def image_classes(self, c1: int, c2: int) -> int:
        return self.quot[c1] & self.sub[c2]

    def hom_vanishes(self, c1: int, c2: int) -> bool:
        return self.image_classes(c1, c2) == 1

    def has_ext(self, c: int, m: int, d: int) -> bool:
        return bool(self.ext[m].get(c, 0) >> d & 1)


class Universe:
    """All isomorphism classes of R-modules of order <= bound, with relation tables."""

    def __init__(self, ring: FiniteRing, bound: int, classes: list[FiniteModule]):
        self.ring = ring
        self.bound = bound
        self.classes = classes
        self._by_fp: dict = defaultdict(list)
        for i, M in enumerate(classes):
            self._by_fp[fingerprint(M)].append(i)
        self.supp = [support(M) for M in classes]
        self.ass = [ass(M) for M in classes]
        self.tables = self._build_tables()
        self.dual = [self.class_of(matlis_dual(M)) for M in classes]

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def n(self) -> int:
        return len(self.classes)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def class_of(self, M: FiniteModule) -> int:
        if M.order > self.bound:
            raise ValueError(f"module of order {M.order} exceeds bound {self.bound}")
        for i in self._by_fp.get(fingerprint(M), ()):
            if is_isomorphic(M, self.classes[i]):
                return i
        raise InvariantViolation(f"{M!r} has no class in the universe")

    def _build_tables(self) -> Tables:
        n = self.n
        sub, quot, ess = [0] * n, [0] * n, [0] * n
        ext: list[dict[int, int]] = [dict() for _ in range(n)]
        for m, M in enumerate(self.classes):
            sets = submodule_sets(M)
            soc = socle_members(M, sets)
            for s in sets:
                c = self.class_of(submodule(M, s).sub)
                d = self.class_of(quotient_by(M, s))
                sub[m] |= 1 << c
                quot[m] |= 1 << d
                ext[m][c] = ext[m].get(c, 0) | 1 << d
                if soc <= s:
                    ess[m] |= 1 << c
        return Tables(n, sub, quot, ext, ess)

    # convenience wrappers over the tables

    def hom_vanishes(self, c1: int, c2: int) -> bool:
        return self.tables.hom_vanishes(c1, c2)

    def image_classes(self, c1: int, c2: int) -> int:
        return self.tables.image_classes(c1, c2)

    def order(self, c: int) -> int:
        return self.classes[c].order

    def describe(self, c: int) -> str:
        return self.classes[c].describe()

    def simple_classes(self) -> list[int]:
        return [c for c in range(1, self.n) if self.tables.sub[c] == (1 | 1 << c)]

    def cyclic_classes(self) -> list[int]:
        """Classes of R/I for every ideal I."""
        from .modules import cyclic_module

        out = {self.class_of(cyclic_module(self.ring, I))
               for I in enumerate_ideals(self.ring) if self.ring.order // I.order <= self.bound}
        return sorted(out)

    def to_dict(self) -> dict:
        T = self.tables
        return {
            "ring": self.ring.name,
            "bound": self.bound,
            "primes": self.ring.spectrum.labels(),
            "classes": [
                {
                    "index": i,
                    "order": M.order,
                    "invariants": list(M.invariant_factors),
                    "supp": sorted(self.supp[i]),
                    "ass": sorted(self.ass[i]),
                    "dual": self.dual[i],
                }
                for i, M in enumerate(self.classes)
            ],
            "sub": [bits(x) for x in T.sub],
            "quot": [bits(x) for x in T.quot],
            "ext": [
                [[c, bits(d)] for c, d in sorted(T.ext[m].items())] for m in range(self.n)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


def _pushout(Mp: FiniteModule, I_sub, incl_cols, psi_cols) -> FiniteModule:
    """(M' (+) R) / {(psi(r), -r)} for r over the additive generators of I."""
    R = Mp.ring
    a, k = Mp.rank, R.rank
    rels = []
    for t, m in enumerate(Mp.invariant_factors):
        rels.append(tuple(m if s == t else 0 for s in range(a + k)))
    for t, d in enumerate(R.invariant_factors):
        rels.append(tuple(d if s == a + t else 0 for s in range(a + k)))
    for p, r in zip(psi_cols, incl_cols):
        rels.append(tuple(p) + tuple(-v for v in r))

    def act(i, x):
        return Mp.act(i, Mp.reduce(x[:a])) + R.mul(R.basis(i), R.reduce(x[a:]))

    M, _ = module_from_quotient(R, a + k, act, rels)
    return M


def build_universe(R: FiniteRing, bound: int, cap: int = DEFAULT_BOUND_CAP) -> Universe:
    if bound < 1:
        raise ValueError("bound must be positive")
    if bound > cap:
        raise CapExceeded(f"bound {bound} exceeds cap {cap}")
    from .modules import zero_module

    F = free_module(R)
    ideals = [I for I in enumerate_ideals(R) if I.order < R.order]
    ideal_data = []
    for I in ideals:
        E = submodule(F, I.elements)
        cols = [E.inclusion.column(c) for c in range(E.sub.rank)]
        ideal_data.append((R.order // I.order, E.sub, cols))

    classes: list[FiniteModule] = [zero_module(R)]
    by_fp: dict = defaultdict(list)
    by_fp[fingerprint(classes[0])].append(0)
    frontier = 0
    while frontier < len(classes):
        Mp = classes[frontier]
        frontier += 1
        for index, Isub, cols in ideal_data:
            if Mp.order * index > bound:
                continue
            for psi in hom_group(Isub, Mp):
                M = _pushout(Mp, Isub, cols, [psi.column(c) for c in range(Isub.rank)])
                fp = fingerprint(M)
                if any(is_isomorphic(M, classes[j]) for j in by_fp[fp]):
                    continue
                by_fp[fp].append(len(classes))
                classes.append(M)
    # deterministic order: by order, additive type, annihilator profile, then discovery
    keyed = sorted(range(len(classes)), key=lambda i: (fingerprint(classes[i]), i))
    classes = [classes[i] for i in keyed]
    log.info("universe %s B=%d: %d classes", R.name, bound, len(classes))
    return Universe(R, bound, classes)


def census_by_closure(R: FiniteRing, bound: int) -> list[FiniteModule]:
    """Independent class census: close {R/I} under submodules, quotients and direct sums."""
    from .modules import cyclic_module, direct_sum

    found: list[FiniteModule] = []
    by_fp: dict = defaultdict(list)

    def add(M):
        fp = fingerprint(M)
        if any(is_isomorphic(M, found[j]) for j in by_fp[fp]):
            return False
        by_fp[fp].append(len(found))
        found.append(M)
        return True

    for I in enumerate_ideals(R):
        if R.order // I.order <= bound:
            add(cyclic_module(R, I))
    changed = True
    while changed:
        changed = False
        for M in list(found):
            for s in submodule_sets(M):
                changed |= add(submodule(M, s).sub)
                changed |= add(quotient_by(M, s))
        for M in list(found):
            for N in list(found):
                if M.order * N.order <= bound:
                    changed |= add(direct_sum(M, N))
    return found


def same_ring_classes(U: Universe, modules: Sequence[FiniteModule]) -> set[int]:
    return {U.class_of(M) for M in modules}
