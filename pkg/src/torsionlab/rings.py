"""Finite commutative rings, their ideals and prime spectra."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import lcm, prod
from typing import Iterable, Sequence

from sympy import isprime

from .errors import CapExceeded, ConfigError, InvariantViolation
from .intlinalg import Vector, lattice_hnf, mixed_radix_elements, present, span_elements

DEFAULT_RING_CAP = 256


@dataclass(frozen=True, eq=False)
class FiniteRing:
    """A finite commutative ring on the additive group (+) Z/d_i.

    ``mult_table[i][j]`` holds the coordinates of ``e_i * e_j``.  Rings compare
    by identity; two calls to :func:`make_zmod` give two distinct rings.
    """

    invariant_factors: tuple[int, ...]
    mult_table: tuple[tuple[Vector, ...], ...]
    unit: Vector
    name: str = ""
    basis_names: tuple[str, ...] | None = field(default=None, repr=False)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return lcm(*self.invariant_factors) if self.invariant_factors else 1

    @property
    def zero(self) -> Vector:
        return tuple(0 for _ in self.invariant_factors)

    @cached_property
    def elements(self) -> list[Vector]:
        return mixed_radix_elements(self.invariant_factors)

    @cached_property
    def index(self) -> dict[Vector, int]:
        return {x: i for i, x in enumerate(self.elements)}

    def basis(self, i: int) -> Vector:
        return tuple(int(j == i) for j in range(self.rank))

    def reduce(self, x: Sequence[int]) -> Vector:
        return tuple(int(v) % d for v, d in zip(x, self.invariant_factors))

    def add(self, x: Vector, y: Vector) -> Vector:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.invariant_factors))

    def neg(self, x: Vector) -> Vector:
        return tuple((-a) % d for a, d in zip(x, self.invariant_factors))

    def mul(self, x: Vector, y: Vector) -> Vector:
        out = [0] * self.rank
        for i, a in enumerate(x):
            if not a:
                continue
            row = self.mult_table[i]
            for j, b in enumerate(y):
                if not b:
                    continue
                c = a * b
                for l, v in enumerate(row[j]):
                    out[l] += c * v
        return self.reduce(out)

    def format_element(self, x: Vector) -> str:
        if self.rank == 1 and self.basis_names is None:
            return str(x[0])
        if self.basis_names is None:
            return "(" + ",".join(map(str, x)) + ")"
        terms = []
        for c, nm in zip(x, self.basis_names):
            if c == 0:
                continue
            if nm == "1":
                terms.append(str(c))
            else:
                terms.append(nm if c == 1 else f"{c}{nm}")
        return "+".join(terms) if terms else "0"

    def validate(self) -> None:
        """Raise :class:`InvariantViolation` unless the structure constants define a ring."""
        k = self.rank
        e = [self.basis(i) for i in range(k)]
        for i in range(k):
            for j in range(k):
                scaled = tuple(self.invariant_factors[i] * v for v in self.mult_table[i][j])
                if any(self.reduce(scaled)):
                    raise InvariantViolation(f"d_{i} e_{i} e_{j} != 0")
                if self.mul(e[i], e[j]) != self.mul(e[j], e[i]):
                    raise InvariantViolation(f"e_{i} e_{j} != e_{j} e_{i}")
                for l in range(k):
                    lhs = self.mul(self.mul(e[i], e[j]), e[l])
                    rhs = self.mul(e[i], self.mul(e[j], e[l]))
                    if lhs != rhs:
                        raise InvariantViolation(f"associativity fails on (e_{i}, e_{j}, e_{l})")
            if self.mul(self.unit, e[i]) != e[i]:
                raise InvariantViolation(f"unit does not fix e_{i}")

    @cached_property
    def spectrum(self) -> "SpecPoset":
        return spec(self)

    def __repr__(self) -> str:
        return f"FiniteRing({self.name or self.invariant_factors})"


def _check_cap(order: int, cap: int) -> None:
    if order > cap:
        raise CapExceeded(f"ring of order {order} exceeds the cap {cap}")


def _transport(
    n: int,
    relations: Sequence[Sequence[int]],
    mul,
    unit: Sequence[int],
    name: str,
    basis_names=None,
) -> FiniteRing:
    """Build a ring on Z^n / span(relations) from an ambient multiplication."""
    pres = present(n, relations)
    k = len(pres.moduli)
    table = tuple(
        tuple(pres.coords(mul(pres.lifts[a], pres.lifts[b])) for b in range(k)) for a in range(k)
    )
    ring = FiniteRing(pres.moduli, table, pres.coords(unit), name, basis_names)
    ring.validate()
    return ring


def make_zmod(n: int, cap: int = DEFAULT_RING_CAP) -> FiniteRing:
    if n < 2:
        raise ConfigError(f"zmod needs n >= 2, got {n}")
    _check_cap(n, cap)
    return FiniteRing((n,), (((1,),),), (1,), f"zmod:{n}")


def make_poly_quotient(p: int, f: Sequence[int], cap: int = DEFAULT_RING_CAP) -> FiniteRing:
    """F_p[x]/(f) with basis 1, x, ..., x^(deg f - 1); ``f`` is low-to-high and monic."""
    if not isprime(p):
        raise ConfigError(f"polyq needs a prime characteristic, got {p}")
    f = [int(c) % p for c in f]
    n = len(f) - 1
    if n < 1:
        raise ConfigError("polyq needs a polynomial of degree >= 1")
    if f[-1] != 1:
        raise ConfigError("polyq needs a monic polynomial")
    _check_cap(p**n, cap)

    def reduce_poly(coeffs: list[int]) -> Vector:
        c = list(coeffs)
        for top in range(len(c) - 1, n - 1, -1):
            lead = c[top] % p
            if lead:
                for i in range(n + 1):
                    c[top - n + i] -= lead * f[i]
        return tuple(v % p for v in c[:n])

    table = []
    for i in range(n):
        row = []
        for j in range(n):
            coeffs = [0] * (2 * n - 1)
            coeffs[i + j] = 1
            row.append(reduce_poly(coeffs))
        table.append(tuple(row))
    names = tuple("1" if i == 0 else ("x" if i == 1 else f"x^{i}") for i in range(n))
    spec = f"polyq:{p}:" + ",".join(map(str, f))
    ring = FiniteRing(tuple([p] * n), tuple(table), tuple(int(i == 0) for i in range(n)), spec, names)
    ring.validate()
    return ring


def make_product(R1: FiniteRing, R2: FiniteRing, cap: int = DEFAULT_RING_CAP) -> FiniteRing:
    if R1.order == 1 or R2.order == 1:
        raise ConfigError("product with the zero ring is not allowed")
    _check_cap(R1.order * R2.order, cap)
    k1, k2 = R1.rank, R2.rank
    rels = [tuple(d if t == i else 0 for t in range(k1 + k2)) for i, d in
            enumerate(R1.invariant_factors + R2.invariant_factors)]

    def mul(x, y):
        a = R1.mul(R1.reduce(x[:k1]), R1.reduce(y[:k1]))
        b = R2.mul(R2.reduce(x[k1:]), R2.reduce(y[k1:]))
        return a + b

    return _transport(k1 + k2, rels, mul, R1.unit + R2.unit, f"prod:({R1.name},{R2.name})")


@dataclass(frozen=True)
class Ideal:
    """An ideal, stored by the Hermite basis of its preimage lattice in Z^k.

    The lattice always contains ``diag(invariant_factors)``, so the basis is
    unique per ideal and equality of ideals is equality of bases.
    """

    ring: FiniteRing
    basis: tuple[Vector, ...]

    @cached_property
    def elements(self) -> frozenset[Vector]:
        return span_elements(self.basis, self.ring.invariant_factors)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x: Vector) -> bool:
        return tuple(x) in self.elements

    def sort_key(self):
        return (self.order, self.basis)

    def label(self) -> str:
        R = self.ring
        for x in R.elements:
            if x in self.elements and len(principal_elements(R, x)) == self.order:
                return f"({R.format_element(x)})"
        gens = []
        span: frozenset[Vector] = frozenset({R.zero})
        for x in R.elements:
            if x in self.elements and x not in span:
                gens.append(x)
                span = frozenset(_ideal_elements(R, gens))
        return "(" + ", ".join(R.format_element(g) for g in gens) + ")"

    def __repr__(self) -> str:
        return f"Ideal{self.label()}"


def principal_elements(R: FiniteRing, x: Vector) -> frozenset[Vector]:
    return frozenset(R.mul(r, x) for r in R.elements)


def _ideal_elements(R: FiniteRing, gens: Iterable[Vector]) -> frozenset[Vector]:
    additive = [R.mul(R.basis(i), g) for g in gens for i in range(R.rank)]
    return span_elements(additive, R.invariant_factors)


def ideal_from_elements(R: FiniteRing, gens: Iterable[Vector]) -> Ideal:
    """The ideal generated by ``gens``."""
    elems = _ideal_elements(R, list(gens))
    return ideal_from_subgroup(R, elems)


def ideal_from_subgroup(R: FiniteRing, elems: Iterable[Vector]) -> Ideal:
    """Wrap an additive subgroup that is already known to be an ideal."""
    k = R.rank
    diag = [tuple(d if t == i else 0 for t in range(k)) for i, d in enumerate(R.invariant_factors)]
    basis = lattice_hnf(list(elems) + diag, k)
    return Ideal(R, basis)


def unit_ideal(R: FiniteRing) -> Ideal:
    return ideal_from_elements(R, [R.unit])


def zero_ideal(R: FiniteRing) -> Ideal:
    return ideal_from_subgroup(R, [])


def enumerate_ideals(R: FiniteRing, cap: int = DEFAULT_RING_CAP) -> list[Ideal]:
    """All ideals of R, sorted by (order, canonical basis)."""
    _check_cap(R.order, cap)
    cyclic = {principal_elements(R, x) for x in R.elements}
    seen = set(cyclic)
    queue = sorted(cyclic, key=lambda s: (len(s), sorted(s)))
    while queue:
        I = queue.pop()
        for C in cyclic:
            if C <= I:
                continue
            J = span_elements(list(I) + list(C), R.invariant_factors)
            if J not in seen:
                seen.add(J)
                queue.append(J)
    return sorted((ideal_from_subgroup(R, s) for s in seen), key=Ideal.sort_key)


def is_prime_ideal(R: FiniteRing, I: Ideal) -> bool:
    """True iff R/I is nonzero and has no zero divisors."""
    if I.ring is not R:
        raise ValueError("ideal belongs to a different ring")
    if I.order == R.order:
        return False
    outside = [x for x in R.elements if x not in I.elements]
    for a, b in itertools.combinations_with_replacement(outside, 2):
        if R.mul(a, b) in I.elements:
            return False
    return True


def has_zero_divisors(R: FiniteRing) -> bool:
    nonzero = [x for x in R.elements if any(x)]
    return any(not any(R.mul(a, b)) for a, b in itertools.combinations_with_replacement(nonzero, 2))


def quotient_ring(R: FiniteRing, I: Ideal) -> FiniteRing:
    if I.order == R.order:
        raise ValueError("cannot form the quotient by the unit ideal")
    k = R.rank
    diag = [tuple(d if t == i else 0 for t in range(k)) for i, d in enumerate(R.invariant_factors)]
    return _transport(k, diag + list(I.basis), lambda x, y: R.mul(R.reduce(x), R.reduce(y)), R.unit,
                      f"{R.name}/{I.label()}")


def is_field(R: FiniteRing) -> bool:
    return R.order > 1 and not has_zero_divisors(R)


def rings_isomorphic(R1: FiniteRing, R2: FiniteRing) -> bool:
    """Exhaustive search for a unital ring isomorphism (small rings only)."""
    if R1.order != R2.order:
        return False
    k = R1.rank
    e = [R1.basis(i) for i in range(k)]

    def additive_order(R, x):
        n, y = 1, x
        while any(y):
            y = R.add(y, x)
            n += 1
        return n

    cands = []
    for i in range(k):
        d = R1.invariant_factors[i]
        cands.append([y for y in R2.elements if d % additive_order(R2, y) == 0])
    for images in itertools.product(*cands):
        def phi(x):
            out = R2.zero
            for c, y in zip(x, images):
                for _ in range(c):
                    out = R2.add(out, y)
            return out

        if phi(R1.unit) != R2.unit:
            continue
        if any(phi(R1.mul(e[i], e[j])) != R2.mul(images[i], images[j])
               for i in range(k) for j in range(k)):
            continue
        if len({phi(x) for x in R1.elements}) == R2.order:
            return True
    return False


@dataclass(frozen=True)
class SpecPoset:
    """Prime ideals ordered by inclusion; ``leq[i][j]`` means primes[i] is inside primes[j]."""

    primes: tuple
    leq: tuple[tuple[bool, ...], ...]

    @property
    def size(self) -> int:
        return len(self.primes)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def is_antichain(self) -> bool:
        return all(not self.leq[i][j] for i in range(self.size) for j in range(self.size) if i != j)

    def is_up_closed(self, mask: int) -> bool:
        for i in range(self.size):
            if mask >> i & 1:
                for j in range(self.size):
                    if self.leq[i][j] and not mask >> j & 1:
                        return False
        return True

    def labels(self) -> list[str]:
        return [p.label() if isinstance(p, Ideal) else str(p) for p in self.primes]


@dataclass(frozen=True)
class SpecClosedSet:
    poset: SpecPoset
    members: int

    def __post_init__(self):
        if not self.poset.is_up_closed(self.members):
            raise ValueError(f"{self.members:b} is not specialization closed")

    @classmethod
    def of(cls, poset: SpecPoset, indices: Iterable[int]) -> "SpecClosedSet":
        mask = 0
        for i in indices:
            if not 0 <= i < poset.size:
                raise ValueError(f"prime index {i} out of range")
            mask |= 1 << i
        return cls(poset, mask)

    def indices(self) -> list[int]:
        return [i for i in range(self.poset.size) if self.members >> i & 1]

    def __contains__(self, i: int) -> bool:
        return bool(self.members >> i & 1)

    def __le__(self, other: "SpecClosedSet") -> bool:
        return self.members & ~other.members == 0

    def __or__(self, other: "SpecClosedSet") -> "SpecClosedSet":
        return SpecClosedSet(self.poset, self.members | other.members)

    def label(self) -> str:
        labels = self.poset.labels()
        return "{" + ", ".join(labels[i] for i in self.indices()) + "}"


def spec(R: FiniteRing) -> SpecPoset:
    primes = tuple(I for I in enumerate_ideals(R) if is_prime_ideal(R, I))
    leq = tuple(tuple(p.elements <= q.elements for q in primes) for p in primes)
    return SpecPoset(primes, leq)


def is_local(R: FiniteRing) -> Ideal | None:
    P = R.spectrum
    return P.primes[0] if P.size == 1 else None


def spec_closed_sets(P: SpecPoset) -> list[SpecClosedSet]:
    masks = [m for m in range(1 << P.size) if P.is_up_closed(m)]
    masks.sort(key=lambda m: (bin(m).count("1"), m))
    return [SpecClosedSet(P, m) for m in masks]


# ---------------------------------------------------------------- spec strings


class _SpecParser:
    def __init__(self, text: str, cap: int):
        self.text = text
        self.pos = 0
        self.cap = cap

    def error(self, msg: str) -> ConfigError:
        return ConfigError(f"ring spec {self.text!r}, column {self.pos + 1}: {msg}")

    def expect(self, token: str) -> None:
        if not self.text.startswith(token, self.pos):
            raise self.error(f"expected {token!r}")
        self.pos += len(token)

    def integer(self) -> int:
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start or self.text[start:self.pos] == "-":
            self.pos = start
            raise self.error("expected an integer")
        return int(self.text[start:self.pos])

    def ring(self) -> FiniteRing:
        start = self.pos
        try:
            if self.text.startswith("zmod:", self.pos):
                self.pos += 5
                return make_zmod(self.integer(), self.cap)
            if self.text.startswith("polyq:", self.pos):
                self.pos += 6
                p = self.integer()
                self.expect(":")
                coeffs = [self.integer()]
                while (self.text.startswith(",", self.pos) and self.pos + 1 < len(self.text)
                       and (self.text[self.pos + 1].isdigit() or self.text[self.pos + 1] == "-")):
                    self.pos += 1
                    coeffs.append(self.integer())
                return make_poly_quotient(p, coeffs, self.cap)
            if self.text.startswith("prod:", self.pos):
                self.pos += 5
                self.expect("(")
                a = self.ring()
                self.expect(",")
                b = self.ring()
                self.expect(")")
                return make_product(a, b, self.cap)
        except ConfigError as exc:
            if "column" in str(exc):
                raise
            self.pos = start
            raise type(exc)(str(self.error(str(exc)))) from exc
        raise self.error("expected 'zmod:', 'polyq:' or 'prod:'")


def parse_ring_spec(text: str, cap: int = DEFAULT_RING_CAP) -> FiniteRing:
    """Parse ``zmod:<n>``, ``polyq:<p>:<c0,...,1>`` or ``prod:(<spec>,<spec>)``."""
    parser = _SpecParser(text.strip(), cap)
    ring = parser.ring()
    if parser.pos != len(parser.text):
        raise parser.error("trailing characters")
    return ring
