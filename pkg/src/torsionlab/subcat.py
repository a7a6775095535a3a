"""Subcategories of a universe as bitsets, and the calculus on them.

A subcategory is an ``int`` mask over class indices with bit 0 (the zero
class) set.  Everything is computed from the Sub/Quot/Ext tables; no maps
are ever enumerated here.

A note on truncation: orthogonals and extension products are taken inside
the universe.  For an extension-closed C, Hom(M, C) = 0 for every C in C
already follows from vanishing on the two ends of each extension, so ^perp C
and C^perp computed at bound B agree with the full finite-module category
on the classes that fit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import CapExceeded, ConfigError, InvariantViolation
from .universe import Tables, bits, mask_of

BRUTE_CAP = 22

BRUTE = "brute"
GENERATED = "generated"
MODES = (BRUTE, GENERATED)


def popcount(x: int) -> int:
    return bin(x).count("1")


def _subset_key(x: int):
    return (popcount(x), x)


@dataclass(frozen=True)
class Subcategory:
    """A set of classes, always containing the zero class."""

    members: int

    def __post_init__(self):
        if not self.members & 1:
            raise ValueError("a subcategory must contain the zero class")

    def indices(self) -> list[int]:
        return bits(self.members)

    def __contains__(self, c: int) -> bool:
        return bool(self.members >> c & 1)

    def __le__(self, other: "Subcategory") -> bool:
        return self.members & ~other.members == 0

    def __and__(self, other: "Subcategory") -> "Subcategory":
        return Subcategory(self.members & other.members)

    def __or__(self, other: "Subcategory") -> "Subcategory":
        return Subcategory(self.members | other.members)

    @classmethod
    def of(cls, indices: Iterable[int]) -> "Subcategory":
        return cls(mask_of(indices) | 1)


@dataclass(frozen=True)
class TTPair:
    torsion: int
    free: int
    certified: bool = False

    def as_tuple(self) -> tuple[int, int]:
        return (self.torsion, self.free)


@dataclass(frozen=True)
class STorsionTheory:
    t: int
    f: int
    heart: int
    certified: bool = False

    def as_tuple(self) -> tuple[int, int]:
        return (self.t, self.f)


class Calculus:
    """Bitset operations over a fixed set of universe tables.

    Besides the boolean answers, the calculus counts disagreements between the
    two torsion-theory characterizations in ``self.divergences``.
    """

    def __init__(self, tables: Tables):
        self.T = tables
        n = tables.n
        self.n = n
        self.full = (1 << n) - 1
        # homnz_out[m]: classes c with Hom(m, c) != 0; homnz_in[c] dually
        self.homnz_out = [0] * n
        self.homnz_in = [0] * n
        for m in range(n):
            for c in range(n):
                if not tables.hom_vanishes(m, c):
                    self.homnz_out[m] |= 1 << c
                    self.homnz_in[c] |= 1 << m
        self.divergences: list[tuple[int, int]] = []
        self._bad_cache: dict[int, tuple[list[int], list[int]]] = {}
        self._serre_ok: set[int] = set()

    # ---------------------------------------------------------------- basic operators

    def ext_product(self, A: int, B: int) -> int:
        """A * B: classes m with a submodule in A whose quotient lies in B."""
        out = 0
        for m in range(self.n):
            for c, dmask in self.T.ext[m].items():
                if A >> c & 1 and dmask & B:
                    out |= 1 << m
                    break
        return out

    def left_perp(self, C: int) -> int:
        out = 0
        for m in range(self.n):
            if not self.homnz_out[m] & C:
                out |= 1 << m
        return out

    def right_perp(self, C: int) -> int:
        out = 0
        for m in range(self.n):
            if not self.homnz_in[m] & C:
                out |= 1 << m
        return out

    def hom_vanishes(self, A: int, B: int) -> bool:
        return all(not self.homnz_out[a] & B for a in bits(A))

    # ---------------------------------------------------------------- closure predicates

    def is_closed_sub(self, C: int) -> bool:
        return all(self.T.sub[m] & ~C == 0 for m in bits(C))

    def is_closed_quot(self, C: int) -> bool:
        return all(self.T.quot[m] & ~C == 0 for m in bits(C))

    def is_closed_ext(self, C: int) -> bool:
        return self.ext_product(C, C) & ~C == 0

    def is_serre(self, C: int) -> bool:
        return bool(C & 1) and self.is_closed_sub(C) and self.is_closed_quot(C) and self.is_closed_ext(C)

    def serre_closure(self, G: int) -> int:
        C = G | 1
        while True:
            nxt = C
            for m in bits(C):
                nxt |= self.T.sub[m] | self.T.quot[m]
            nxt |= self.ext_product(nxt, nxt)
            if nxt == C:
                return C
            C = nxt

    # ---------------------------------------------------------------- torsion theories

    def is_torsion_theory_hom(self, X: int, Y: int) -> bool:
        return self.hom_vanishes(X, Y) and X == self.left_perp(Y) and Y == self.right_perp(X)

    def is_torsion_theory_remark(self, X: int, Y: int) -> bool:
        return (
            X & Y == 1
            and self.is_closed_quot(X)
            and self.is_closed_sub(Y)
            and self.ext_product(X, Y) == self.full
        )

    def is_torsion_theory(self, X: int, Y: int) -> bool:
        """Both characterizations; a disagreement is logged in ``divergences``."""
        a = self.is_torsion_theory_hom(X, Y)
        b = self.is_torsion_theory_remark(X, Y)
        if a != b:
            self.divergences.append((X, Y))
        return a and b

    # ---------------------------------------------------------------- S-torsion theories

    def _require_serre(self, S: int) -> None:
        if S in self._serre_ok:
            return
        if not self.is_serre(S):
            raise ConfigError(f"heart {bits(S)} is not a Serre subcategory")
        self._serre_ok.add(S)

    def _bad(self, S: int) -> tuple[list[int], list[int]]:
        """bad_out[m] = {f : some image m -> f escapes S}; bad_in is the transpose."""
        cached = self._bad_cache.get(S)
        if cached is not None:
            return cached
        n = self.n
        out, inn = [0] * n, [0] * n
        for m in range(n):
            for f in range(n):
                if self.T.image_classes(m, f) & ~S:
                    out[m] |= 1 << f
                    inn[f] |= 1 << m
        self._bad_cache[S] = (out, inn)
        return out, inn

    def s_left(self, F: int, S: int) -> int:
        """Classes all of whose images into members of F lie in S."""
        self._require_serre(S)
        bad_out, _ = self._bad(S)
        return mask_of(m for m in range(self.n) if not bad_out[m] & F)

    def s_right(self, T: int, S: int) -> int:
        self._require_serre(S)
        _, bad_in = self._bad(S)
        return mask_of(f for f in range(self.n) if not bad_in[f] & T)

    def tt1(self, T: int, F: int, S: int) -> bool:
        bad_out, _ = self._bad(S)
        return all(not bad_out[t] & F for t in bits(T))

    def is_s_torsion_theory(self, T: int, F: int, S: int) -> bool:
        self._require_serre(S)
        return self.tt1(T, F, S) and T == self.s_left(F, S) and F == self.s_right(T, S)

    # ---------------------------------------------------------------- canonicity

    def is_canonical(self, T: int, F: int) -> bool:
        return self.ext_product(T, F) == self.full

    def left_canonical_product(self, T: int, S: int) -> int:
        return self.ext_product(T & self.left_perp(S), T & S)

    def right_canonical_product(self, F: int, S: int) -> int:
        return self.ext_product(S & F, self.right_perp(S) & F)

    def is_left_canonical(self, T: int, F: int, S: int) -> bool:
        return self.left_canonical_product(T, S) == T

    def is_right_canonical(self, T: int, F: int, S: int) -> bool:
        return self.right_canonical_product(F, S) == F

    def heart_check(self, T: int, F: int, S: int) -> int:
        heart = T & F
        if heart != S:
            raise InvariantViolation(f"T & F = {bits(heart)} but the heart is {bits(S)}")
        return heart

    # ---------------------------------------------------------------- enumeration

    def _all_subcategories(self) -> Iterator[int]:
        if self.n > BRUTE_CAP:
            raise CapExceeded(f"{self.n} classes exceed the brute-force cap of {BRUTE_CAP}")
        for i in range(1 << (self.n - 1)):
            yield i << 1 | 1

    def enumerate_serre(self, mode: str = BRUTE, simples: Iterable[int] = ()) -> list[int]:
        if mode == BRUTE:
            found = [C for C in self._all_subcategories() if self.is_serre(C)]
        else:
            simples = list(simples)
            found = {self.serre_closure(mask_of(sub))
                     for k in range(len(simples) + 1)
                     for sub in itertools.combinations(simples, k)}
        return sorted(set(found), key=_subset_key)

    def enumerate_torsion_theories(self, mode: str = BRUTE, generators: Iterable[int] = ()) -> list[TTPair]:
        pairs = set()
        if mode == BRUTE:
            for X in self._all_subcategories():
                Y = self.right_perp(X)
                if self.is_torsion_theory_hom(X, Y):
                    pairs.add((X, Y))
        else:
            gens = list(generators)
            for k in range(len(gens) + 1):
                for sub in itertools.combinations(gens, k):
                    Y = self.right_perp(mask_of(sub) | 1)
                    X = self.left_perp(Y)
                    if self.is_torsion_theory_hom(X, Y):
                        pairs.add((X, Y))
        return [TTPair(X, Y, certified=self.is_torsion_theory(X, Y))
                for X, Y in sorted(pairs, key=lambda p: (_subset_key(p[0]), p[1]))]

    def enumerate_s_torsion_theories(self, S: int, mode: str = BRUTE, generators: Iterable[int] = ()) -> list[STorsionTheory]:
        """Galois-closed pairs T = s_left(F), F = s_right(T); TT1 then holds by construction."""
        self._require_serre(S)
        if mode == BRUTE:
            candidates: Iterable[int] = self._all_subcategories()
        else:
            gens = list(generators)
            candidates = {self.s_right(self.serre_closure(mask_of(sub)) | S, S)
                          for k in range(len(gens) + 1) for sub in itertools.combinations(gens, k)}
        pairs = set()
        for F in candidates:
            T = self.s_left(F, S)
            pairs.add((T, self.s_right(T, S)))
        out = []
        for T, F in sorted(pairs, key=lambda p: (_subset_key(p[0]), p[1])):
            out.append(STorsionTheory(T, F, S, certified=self.is_s_torsion_theory(T, F, S)))
        return out
