"""Finite modules over a :class:`FiniteRing`.

A module is an additive group (+) Z/m_j in Smith form together with one
integer matrix per additive ring generator e_i; column c of ``actions[i]``
holds the coordinates of ``e_i * u_c``.  Elements are coordinate tuples.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from math import prod
from fractions import Fraction
from typing import Iterable, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import IsomorphismUndecided, InvariantViolation
from .intlinalg import (
    Vector,
    extend_span,
    integer_kernel,
    lattice_hnf,
    mixed_radix_elements,
    present,
)
from .rings import FiniteRing, Ideal, SpecClosedSet, ideal_from_subgroup

Matrix = tuple[tuple[int, ...], ...]

ISO_BUDGET = 200_000


def _diag_cols(moduli: Sequence[int]) -> list[Vector]:
    n = len(moduli)
    return [tuple(m if t == i else 0 for t in range(n)) for i, m in enumerate(moduli)]


@dataclass(frozen=True, eq=False)
class FiniteModule:
    ring: FiniteRing
    invariant_factors: tuple[int, ...]
    actions: tuple[Matrix, ...]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def zero(self) -> Vector:
        return tuple(0 for _ in self.invariant_factors)

    def is_zero(self) -> bool:
        return self.order == 1

    @cached_property
    def elements(self) -> list[Vector]:
        return mixed_radix_elements(self.invariant_factors)

    @cached_property
    def index(self) -> dict[Vector, int]:
        return {x: i for i, x in enumerate(self.elements)}

    def basis(self, c: int) -> Vector:
        return tuple(int(j == c) for j in range(self.rank))

    def reduce(self, x: Sequence[int]) -> Vector:
        return tuple(int(v) % m for v, m in zip(x, self.invariant_factors))

    def add(self, x: Vector, y: Vector) -> Vector:
        return tuple((a + b) % m for a, b, m in zip(x, y, self.invariant_factors))

    def neg(self, x: Vector) -> Vector:
        return tuple((-a) % m for a, m in zip(x, self.invariant_factors))

    def act(self, i: int, x: Sequence[int]) -> Vector:
        A = self.actions[i]
        return tuple(
            sum(a * v for a, v in zip(row, x)) % m for row, m in zip(A, self.invariant_factors)
        )

    def act_ring(self, r: Vector, x: Vector) -> Vector:
        out = [0] * self.rank
        for i, c in enumerate(r):
            if c:
                y = self.act(i, x)
                for t in range(self.rank):
                    out[t] += c * y[t]
        return self.reduce(out)

    @cached_property
    def _generator_actions(self) -> list[list[Vector]]:
        """``[x_index][i]`` -> e_i * x, for every element x."""
        k = self.ring.rank
        return [[self.act(i, x) for i in range(k)] for x in self.elements]

    def ring_multiples(self, x: Vector) -> list[Vector]:
        """Additive generators e_i * x of the cyclic submodule Rx."""
        return self._generator_actions[self.index[x]]

    def cyclic_span(self, x: Vector) -> frozenset[Vector]:
        elems: set[Vector] = {self.zero}
        for y in self.ring_multiples(x):
            elems = extend_span(elems, y, self.invariant_factors)
        return frozenset(elems)

    @cached_property
    def element_annihilators(self) -> list[Ideal]:
        R = self.ring
        out = []
        for x in self.elements:
            mult = self.ring_multiples(x)
            kill = []
            for r in R.elements:
                acc = [0] * self.rank
                for c, y in zip(r, mult):
                    if c:
                        for t in range(self.rank):
                            acc[t] += c * y[t]
                if not any(self.reduce(acc)):
                    kill.append(r)
            out.append(ideal_from_subgroup(R, kill))
        return out

    def validate(self) -> None:
        """Raise :class:`InvariantViolation` unless the actions define an R-module."""
        R = self.ring
        k, n = R.rank, self.rank
        m = self.invariant_factors
        if len(self.actions) != k:
            raise InvariantViolation("one action matrix per ring generator is required")
        for i in range(k):
            for c in range(n):
                col = self.act(i, self.basis(c))
                if any(self.reduce(m[c] * v for v in col)):
                    raise InvariantViolation(f"e_{i} action ignores the relation on u_{c}")
                if any(self.reduce(R.invariant_factors[i] * v for v in col)):
                    raise InvariantViolation(f"d_{i} * e_{i} does not kill u_{c}")
        for c in range(n):
            u = self.basis(c)
            for i in range(k):
                for j in range(k):
                    lhs = self.act(i, self.act(j, u))
                    rhs = self.act_ring(R.mult_table[i][j], u)
                    if lhs != rhs:
                        raise InvariantViolation(f"(e_{i} e_{j}) u_{c} mismatch")
            if self.act_ring(R.unit, u) != u:
                raise InvariantViolation(f"unit does not fix u_{c}")

    def describe(self) -> str:
        if self.is_zero():
            return "0"
        return "+".join(f"Z/{m}" for m in self.invariant_factors)

    def __repr__(self) -> str:
        return f"FiniteModule({self.describe()} over {self.ring.name})"


@dataclass(frozen=True, eq=False)
class ModuleHom:
    domain: FiniteModule
    codomain: FiniteModule
    matrix: Matrix  # codomain.rank x domain.rank

    def __call__(self, x: Sequence[int]) -> Vector:
        return tuple(
            sum(a * v for a, v in zip(row, x)) % m
            for row, m in zip(self.matrix, self.codomain.invariant_factors)
        )

    def column(self, c: int) -> Vector:
        return tuple(row[c] % m for row, m in zip(self.matrix, self.codomain.invariant_factors))

    def is_zero(self) -> bool:
        return not any(any(self.column(c)) for c in range(self.domain.rank))

    def validate(self) -> None:
        M, N = self.domain, self.codomain
        for c in range(M.rank):
            img = self.column(c)
            if any(N.reduce(M.invariant_factors[c] * v for v in img)):
                raise InvariantViolation("hom ignores an additive relation")
            for i in range(M.ring.rank):
                if self(M.act(i, M.basis(c))) != N.act(i, img):
                    raise InvariantViolation("hom is not equivariant")


@dataclass(frozen=True, eq=False)
class SubmoduleEmbedding:
    ambient: FiniteModule
    sub: FiniteModule
    inclusion: ModuleHom
    members: frozenset[Vector]

    @property
    def order(self) -> int:
        return len(self.members)


@dataclass(frozen=True, eq=False)
class HomGroup:
    """Hom_R(M, N) as a finite abelian group with a Smith basis."""

    domain: FiniteModule
    codomain: FiniteModule
    generators: tuple[ModuleHom, ...]
    generator_orders: tuple[int, ...]

    @property
    def order(self) -> int:
        return prod(self.generator_orders)

    def __len__(self) -> int:
        return self.order

    def __iter__(self):
        M, N = self.domain, self.codomain
        for coeffs in itertools.product(*(range(o) for o in self.generator_orders)):
            mat = [[0] * M.rank for _ in range(N.rank)]
            for c, g in zip(coeffs, self.generators):
                for r in range(N.rank):
                    for s in range(M.rank):
                        mat[r][s] += c * g.matrix[r][s]
            yield ModuleHom(M, N, tuple(tuple(v % N.invariant_factors[r] for v in row)
                                        for r, row in enumerate(mat)))


# ------------------------------------------------------------------ builders


def module_from_quotient(R: FiniteRing, n: int, act, relations: Sequence[Sequence[int]]):
    """Module on Z^n / span(relations) with ambient action ``act(i, vector)``.

    Returns ``(module, presentation)``.
    """
    pres = present(n, relations)
    k = len(pres.moduli)
    actions = []
    for i in range(R.rank):
        cols = [pres.coords(act(i, pres.lifts[c])) for c in range(k)]
        actions.append(tuple(tuple(cols[c][r] for c in range(k)) for r in range(k)))
    return FiniteModule(R, pres.moduli, tuple(actions)), pres


def zero_module(R: FiniteRing) -> FiniteModule:
    return FiniteModule(R, (), tuple(() for _ in range(R.rank)))


def free_module(R: FiniteRing) -> FiniteModule:
    """R as a module over itself."""
    M, _ = module_from_quotient(
        R, R.rank, lambda i, x: R.mul(R.basis(i), R.reduce(x)), _diag_cols(R.invariant_factors)
    )
    return M


def cyclic_module(R: FiniteRing, I: Ideal) -> FiniteModule:
    """The module R/I."""
    M, _ = module_from_quotient(
        R,
        R.rank,
        lambda i, x: R.mul(R.basis(i), R.reduce(x)),
        _diag_cols(R.invariant_factors) + list(I.basis),
    )
    return M


def direct_sum(M: FiniteModule, N: FiniteModule) -> FiniteModule:
    if M.ring is not N.ring:
        raise ValueError("direct sum of modules over different rings")
    a = M.rank

    def act(i, x):
        return M.act(i, M.reduce(x[:a])) + N.act(i, N.reduce(x[a:]))

    S, _ = module_from_quotient(
        M.ring, a + N.rank, act, _diag_cols(M.invariant_factors + N.invariant_factors)
    )
    return S


def _additive_generators(M: FiniteModule, members: Iterable[Vector]) -> list[Vector]:
    gens: list[Vector] = []
    span: set[Vector] = {M.zero}
    for x in sorted(members, key=M.index.__getitem__):
        if x not in span:
            gens.append(x)
            span = extend_span(span, x, M.invariant_factors)
    return gens


def submodule(M: FiniteModule, members: Iterable[Vector]) -> SubmoduleEmbedding:
    """Present an action-stable subgroup of M (given by its elements) as a module."""
    members = frozenset(members)
    h = _additive_generators(M, members)
    s, n = len(h), M.rank
    m = M.invariant_factors
    # {c in Z^s : sum c_j h_j = 0 in M} is the projection of ker [H | diag(m)]
    rows = [[h[j][r] for j in range(s)] + [m[r] if t == r else 0 for t in range(n)] for r in range(n)]
    kernel = [v[:s] for v in integer_kernel(rows, n, s + n)] if s else []
    pres = present(s, kernel)
    k = len(pres.moduli)
    basis = []
    for lift in pres.lifts:
        acc = [0] * n
        for c, g in zip(lift, h):
            for r in range(n):
                acc[r] += c * g[r]
        basis.append(M.reduce(acc))
    lookup: dict[Vector, Vector] = {}
    for coeffs in mixed_radix_elements(pres.moduli):
        acc = [0] * n
        for c, b in zip(coeffs, basis):
            for r in range(n):
                acc[r] += c * b[r]
        lookup[M.reduce(acc)] = coeffs
    if len(lookup) != len(members):
        raise InvariantViolation("submodule presentation lost elements")
    actions = []
    for i in range(M.ring.rank):
        cols = [lookup[M.act(i, b)] for b in basis]
        actions.append(tuple(tuple(cols[c][r] for c in range(k)) for r in range(k)))
    N = FiniteModule(M.ring, pres.moduli, tuple(actions))
    incl = ModuleHom(N, M, tuple(tuple(basis[c][r] for c in range(k)) for r in range(n)))
    return SubmoduleEmbedding(M, N, incl, members)


def quotient_by(M: FiniteModule, members: Iterable[Vector]) -> FiniteModule:
    rels = _diag_cols(M.invariant_factors) + _additive_generators(M, members)
    Q, _ = module_from_quotient(M.ring, M.rank, lambda i, x: M.act(i, M.reduce(x)), rels)
    return Q


def quotient_module(E: SubmoduleEmbedding) -> FiniteModule:
    return quotient_by(E.ambient, E.members)


def submodule_sets(M: FiniteModule) -> list[frozenset[Vector]]:
    """Element sets of all submodules of M, ordered by (order, sorted element indices)."""
    cyclic = {M.cyclic_span(x) for x in M.elements}
    seen = set(cyclic)
    stack = list(cyclic)
    cyc = sorted(cyclic, key=len)
    while stack:
        N = stack.pop()
        for C in cyc:
            if C <= N:
                continue
            S: set[Vector] | frozenset[Vector] = N
            for g in C:
                if g not in S:
                    S = extend_span(S, g, M.invariant_factors)
            S = frozenset(S)
            if S not in seen:
                seen.add(S)
                stack.append(S)
    return sorted(seen, key=lambda s: (len(s), sorted(M.index[x] for x in s)))


def submodules(M: FiniteModule) -> list[SubmoduleEmbedding]:
    return [submodule(M, s) for s in submodule_sets(M)]


def socle_members(M: FiniteModule, subs: Sequence[frozenset[Vector]] | None = None) -> frozenset[Vector]:
    """Sum of the minimal nonzero submodules."""
    subs = submodule_sets(M) if subs is None else subs
    nonzero = [s for s in subs if len(s) > 1]
    minimal = [s for s in nonzero if not any(t < s for t in nonzero)]
    span: set[Vector] = {M.zero}
    for s in minimal:
        for g in s:
            if g not in span:
                span = extend_span(span, g, M.invariant_factors)
    return frozenset(span)


# ------------------------------------------------------------------ homs


def hom_group(M: FiniteModule, N: FiniteModule) -> HomGroup:
    """Solve for all equivariant additive maps M -> N via integer linear algebra."""
    if M.ring is not N.ring:
        raise ValueError("modules over different rings")
    a, b = M.rank, N.rank
    m, n = M.invariant_factors, N.invariant_factors
    nv = a * b
    if nv == 0:
        return HomGroup(M, N, (), ())

    def var(l, j):
        return l * a + j

    constraints: list[tuple[list[int], int]] = []
    for l in range(b):
        for j in range(a):
            row = [0] * nv
            row[var(l, j)] = m[j]
            constraints.append((row, n[l]))
    for i in range(M.ring.rank):
        A, B = M.actions[i], N.actions[i]
        for l in range(b):
            for j in range(a):
                row = [0] * nv
                for t in range(b):
                    row[var(t, j)] += B[l][t]
                for t in range(a):
                    row[var(l, t)] -= A[t][j]
                constraints.append((row, n[l]))
    ncons = len(constraints)
    rows = [row + [mod if t == r else 0 for t in range(ncons)] for r, (row, mod) in enumerate(constraints)]
    sol = [v[:nv] for v in integer_kernel(rows, ncons, nv + ncons)]
    trivial = [tuple(n[l] if t == var(l, j) else 0 for t in range(nv)) for l in range(b) for j in range(a)]
    # Hom = S / T0 where S is the solution lattice and T0 the multiples of n_l
    Sb = lattice_hnf(sol + trivial, nv)
    if len(Sb) != nv:
        raise InvariantViolation("solution lattice lost rank")
    Sinv = unimodular_inverse_rational(Sb, nv)
    X = []
    for t in trivial:
        coords = [sum(Sinv[r][c] * t[c] for c in range(nv)) for r in range(nv)]
        if any(v.denominator != 1 for v in coords):
            raise InvariantViolation("trivial solutions outside the solution lattice")
        X.append(tuple(int(v) for v in coords))
    pres = present(nv, X)
    gens, orders = [], []
    for lift, o in zip(pres.lifts, pres.moduli):
        vec = [sum(Sb[c][r] * lift[c] for c in range(nv)) for r in range(nv)]
        mat = tuple(tuple(vec[var(l, j)] % n[l] for j in range(a)) for l in range(b))
        gens.append(ModuleHom(M, N, mat))
        orders.append(o)
    return HomGroup(M, N, tuple(gens), tuple(orders))


def unimodular_inverse_rational(cols: Sequence[Sequence[int]], n: int):
    """Inverse (as Fractions) of the square matrix whose columns are ``cols``."""
    mat = DomainMatrix([[QQ(int(cols[c][r])) for c in range(n)] for r in range(n)], (n, n), QQ)
    inv = mat.inv().to_list()
    return [[Fraction(int(v.numerator), int(v.denominator)) for v in row] for row in inv]


def image(phi: ModuleHom) -> FiniteModule:
    N = phi.codomain
    elems: set[Vector] = {N.zero}
    for c in range(phi.domain.rank):
        g = phi.column(c)
        if g not in elems:
            elems = extend_span(elems, g, N.invariant_factors)
    return submodule(N, elems).sub


# ------------------------------------------------------------------ isomorphism


def fingerprint(M: FiniteModule):
    """Isomorphism invariant: additive type plus the multiset of element annihilators."""
    counts = Counter(ann.basis for ann in M.element_annihilators)
    return (M.order, M.invariant_factors, tuple(sorted(counts.items())))


def _ring_generators(M: FiniteModule) -> list[Vector]:
    """Greedy R-module generating set, largest cyclic submodules first."""
    order = sorted(range(M.order), key=lambda i: (-len(M.cyclic_span(M.elements[i])), i))
    gens: list[Vector] = []
    span: set[Vector] = {M.zero}
    for i in order:
        x = M.elements[i]
        if x in span:
            continue
        gens.append(x)
        for y in M.ring_multiples(x):
            if y not in span:
                span = extend_span(span, y, M.invariant_factors)
        if len(span) == M.order:
            break
    return gens


def _extend_graph(M, N, graph, image_set, pairs, injective):
    """Close a hom graph (a dict M -> N defined on a submodule) under extra pairs.

    Returns the new ``(graph, image_set)`` or ``None`` on inconsistency
    (or loss of injectivity when ``injective``).
    """
    graph = dict(graph)
    image_set = set(image_set)
    for g, y in pairs:
        if g in graph:
            if graph[g] != y:
                return None
            continue
        base = list(graph.items())
        sg, sy = g, y
        while sg not in graph:
            for x, fx in base:
                nx, ny = M.add(x, sg), N.add(fx, sy)
                if injective and ny in image_set:
                    return None
                graph[nx] = ny
                image_set.add(ny)
            sg, sy = M.add(sg, g), N.add(sy, y)
        # sg is back inside the old domain: its image must agree
        if graph[sg] != sy:
            return None
    return graph, image_set


def is_isomorphic(M: FiniteModule, N: FiniteModule, budget: int = ISO_BUDGET) -> bool:
    """Decide M = N by invariants, then a backtracking search for an isomorphism.

    Raises :class:`IsomorphismUndecided` if ``budget`` extension steps are spent.
    """
    if M.ring is not N.ring:
        raise ValueError("modules over different rings")
    if M is N:
        return True
    if fingerprint(M) != fingerprint(N):
        return False
    return find_isomorphism(M, N, budget) is not None


def find_isomorphism(M: FiniteModule, N: FiniteModule, budget: int = ISO_BUDGET):
    """Return an isomorphism graph (dict) M -> N, or None if none exists."""
    if M.order != N.order:
        return None
    gens = _ring_generators(M)
    ann_M = M.element_annihilators
    ann_N = N.element_annihilators
    cands = []
    for g in gens:
        key = ann_M[M.index[g]]
        cands.append([y for y, a in zip(N.elements, ann_N) if a == key])
    steps = 0

    def search(j, graph, image_set):
        nonlocal steps
        if j == len(gens):
            return graph if len(graph) == N.order else None
        for y in cands[j]:
            if y in image_set:
                continue
            steps += 1
            if steps > budget:
                raise IsomorphismUndecided(f"isomorphism search exceeded {budget} steps")
            pairs = list(zip(M.ring_multiples(gens[j]), N.ring_multiples(y)))
            ext = _extend_graph(M, N, graph, image_set, pairs, injective=True)
            if ext is not None:
                found = search(j + 1, *ext)
                if found is not None:
                    return found
        return None

    return search(0, {M.zero: N.zero}, {N.zero})


def enumerate_homs_by_generators(M: FiniteModule, N: FiniteModule):
    """Every hom M -> N as a graph dict, by trying all images of an R-generating set."""
    gens = _ring_generators(M)
    out = []
    for ys in itertools.product(N.elements, repeat=len(gens)):
        graph, image_set = {M.zero: N.zero}, {N.zero}
        ok = True
        for g, y in zip(gens, ys):
            ext = _extend_graph(M, N, graph, image_set, list(zip(M.ring_multiples(g), N.ring_multiples(y))),
                                injective=False)
            if ext is None:
                ok = False
                break
            graph, image_set = ext
        if ok:
            out.append(graph)
    return out


# ------------------------------------------------------------------ annihilators, Supp, Ass


def annihilator(M: FiniteModule) -> Ideal:
    R = M.ring
    kill = [r for r in R.elements if all(not any(M.act_ring(r, M.basis(c))) for c in range(M.rank))]
    return ideal_from_subgroup(R, kill)


def _primes_over(R: FiniteRing, I: Ideal) -> frozenset[int]:
    return frozenset(i for i, p in enumerate(R.spectrum.primes) if I.elements <= p.elements)


def support(M: FiniteModule) -> frozenset[int]:
    """Indices (into ``ring.spectrum.primes``) of the primes containing Ann(M)."""
    if M.is_zero():
        return frozenset()
    return _primes_over(M.ring, annihilator(M))


def ass(M: FiniteModule) -> frozenset[int]:
    """Indices of the primes that occur as annihilators of single elements."""
    primes = M.ring.spectrum.primes
    anns = set(M.element_annihilators[1:]) if M.order > 1 else set()
    return frozenset(i for i, p in enumerate(primes) if p in anns)


def gamma_members(M: FiniteModule, W: SpecClosedSet) -> frozenset[Vector]:
    """Elements x with Supp(Rx) inside W.  Supp(Rx) = V(Ann x) for cyclic Rx."""
    R = M.ring
    out = []
    for x, ann_x in zip(M.elements, M.element_annihilators):
        if x == M.zero or _primes_over(R, ann_x) <= frozenset(W.indices()):
            out.append(x)
    return frozenset(out)


def gamma_W(M: FiniteModule, W: SpecClosedSet) -> SubmoduleEmbedding:
    return submodule(M, gamma_members(M, W))


# ------------------------------------------------------------------ duality


def matlis_dual(M: FiniteModule) -> FiniteModule:
    """Hom_Z(M, Z/e) with the transposed action, e the ring's additive exponent."""
    m = M.invariant_factors
    n = M.rank
    actions = []
    for A in M.actions:
        D = []
        for j in range(n):
            row = []
            for k in range(n):
                num = A[k][j] * m[j]
                if num % m[k]:
                    raise InvariantViolation("module action is not well defined")
                row.append((num // m[k]) % m[j])
            D.append(tuple(row))
        actions.append(tuple(D))
    return FiniteModule(M.ring, m, tuple(actions))
