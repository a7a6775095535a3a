"""Integer linear algebra over finite abelian groups.

Thin layer over sympy's Smith and Hermite normal forms.  Everything here
works with plain nested lists/tuples of Python ints; the sympy objects
never leak out.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import hermite_normal_form, smith_normal_decomp

Vector = tuple[int, ...]


def _dm(rows: Sequence[Sequence[int]], nrows: int, ncols: int) -> DomainMatrix:
    return DomainMatrix([[ZZ(int(v)) for v in row] for row in rows], (nrows, ncols), ZZ)


def _to_lists(m: DomainMatrix) -> list[list[int]]:
    return [[int(v) for v in row] for row in m.to_list()]


def columns_to_rows(cols: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    """Stack column vectors of length ``n`` into an n x len(cols) matrix."""
    return [[int(c[i]) for c in cols] for i in range(n)]


def smith(rows: Sequence[Sequence[int]], nrows: int, ncols: int):
    """Return ``(diag, S, T)`` with ``S @ A @ T`` diagonal.

    ``diag`` has length ``min(nrows, ncols)``; ``S`` and ``T`` are unimodular.
    """
    if nrows == 0 or ncols == 0:
        S = [[int(i == j) for j in range(nrows)] for i in range(nrows)]
        T = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
        return [], S, T
    D, S, T = smith_normal_decomp(_dm(rows, nrows, ncols))
    Dl = _to_lists(D)
    diag = [abs(Dl[i][i]) for i in range(min(nrows, ncols))]
    S = _to_lists(S)
    T = _to_lists(T)
    # sympy may hand back negative diagonal entries; fold the sign into S.
    for i in range(min(nrows, ncols)):
        if Dl[i][i] < 0:
            S[i] = [-v for v in S[i]]
    return diag, S, T


def unimodular_inverse(M: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(M)
    if n == 0:
        return []
    inv = DomainMatrix([[QQ(int(v)) for v in row] for row in M], (n, n), QQ).inv()
    out = [[int(v) for v in row] for row in inv.to_list()]
    return out


def integer_kernel(rows: Sequence[Sequence[int]], nrows: int, ncols: int) -> list[Vector]:
    """Basis of the integer kernel {x in Z^ncols : A x = 0}."""
    if ncols == 0:
        return []
    if nrows == 0:
        return [tuple(int(i == j) for i in range(ncols)) for j in range(ncols)]
    diag, _, T = smith(rows, nrows, ncols)
    basis = []
    for j in range(ncols):
        if j >= len(diag) or diag[j] == 0:
            basis.append(tuple(T[i][j] for i in range(ncols)))
    return basis


def lattice_hnf(cols: Iterable[Sequence[int]], n: int) -> tuple[Vector, ...]:
    """Canonical basis (Hermite normal form columns) of the lattice spanned by ``cols``."""
    cols = [tuple(int(v) for v in c) for c in cols]
    if not cols or n == 0:
        return ()
    H = hermite_normal_form(_dm(columns_to_rows(cols, n), n, len(cols)))
    Hl = _to_lists(H)
    ncols = len(Hl[0]) if Hl else 0
    out = []
    for j in range(ncols):
        col = tuple(Hl[i][j] for i in range(n))
        if any(col):
            out.append(col)
    return tuple(out)


def abs_det(cols: Sequence[Sequence[int]], n: int) -> int:
    """Index of a full-rank lattice in Z^n, given a spanning set of columns."""
    h = lattice_hnf(cols, n)
    if len(h) != n:
        raise ValueError("lattice is not of full rank")
    d = 1
    for i, col in enumerate(h):
        # square HNF is triangular, pivots on the diagonal
        d *= col[i]
    return abs(d)


@dataclass(frozen=True)
class Presentation:
    """A finite quotient Z^n / L written in Smith form.

    ``to_coords`` maps an ambient vector x to its coordinates ``(P x) mod moduli``;
    ``lifts[k]`` is an ambient vector representing the k-th new generator.
    """

    moduli: tuple[int, ...]
    to_coords: tuple[Vector, ...]
    lifts: tuple[Vector, ...]

    def coords(self, x: Sequence[int]) -> Vector:
        return tuple(
            sum(p * v for p, v in zip(row, x)) % m for row, m in zip(self.to_coords, self.moduli)
        )


def present(n: int, relations: Sequence[Sequence[int]]) -> Presentation:
    """Present Z^n / span(relations); the span must have full rank."""
    rels = [tuple(int(v) for v in r) for r in relations if any(r)]
    if n == 0:
        return Presentation((), (), ())
    diag, S, _ = smith(columns_to_rows(rels, n), n, len(rels))
    if len(diag) < n or any(d == 0 for d in diag):
        raise ValueError("relations do not span a full-rank lattice")
    Sinv = unimodular_inverse(S)
    moduli, to_coords, lifts = [], [], []
    for i, d in enumerate(diag):
        if d == 1:
            continue
        moduli.append(d)
        to_coords.append(tuple(v % d for v in S[i]))
        lifts.append(tuple(Sinv[r][i] for r in range(n)))
    return Presentation(tuple(moduli), tuple(to_coords), tuple(lifts))


def span_elements(gens: Iterable[Sequence[int]], moduli: Sequence[int]) -> frozenset[Vector]:
    """All elements of the subgroup of (+) Z/m_i generated by ``gens``."""
    zero = tuple(0 for _ in moduli)
    elems = {zero}
    for g in gens:
        g = tuple(int(v) % m for v, m in zip(g, moduli))
        elems = extend_span(elems, g, moduli)
    return frozenset(elems)


def extend_span(elems: set[Vector] | frozenset[Vector], g: Vector, moduli: Sequence[int]) -> set[Vector]:
    """Subgroup generated by ``elems`` (already a subgroup) and ``g``."""
    if g in elems:
        return set(elems)
    out = set(elems)
    shift = g
    while shift not in elems:
        out.update(tuple((a + b) % m for a, b, m in zip(x, shift, moduli)) for x in elems)
        shift = tuple((a + b) % m for a, b, m in zip(shift, g, moduli))
    return out


def mixed_radix_elements(moduli: Sequence[int]) -> list[Vector]:
    """All vectors of (+) Z/m_i in lexicographic order."""
    out: list[Vector] = [()]
    for m in moduli:
        out = [x + (v,) for x in out for v in range(m)]
    return out
