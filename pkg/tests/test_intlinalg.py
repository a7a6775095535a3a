from hypothesis import given, settings, strategies as st

from torsionlab.intlinalg import (
    abs_det,
    extend_span,
    integer_kernel,
    lattice_hnf,
    mixed_radix_elements,
    present,
    smith,
    span_elements,
)


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def test_smith_diagonalizes():
    A = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    diag, S, T = smith(A, 3, 3)
    D = matmul(matmul(S, A), T)
    assert diag == [2, 6, 12]
    assert all(D[i][j] == (diag[i] if i == j else 0) for i in range(3) for j in range(3))


def test_present_cyclic_product():
    p = present(2, [(2, 0), (0, 3)])
    assert p.moduli == (6,)
    # (1, 1) generates Z/2 + Z/3
    assert len({p.coords((k, k)) for k in range(6)}) == 6


def test_present_drops_trivial_factors():
    assert present(2, [(1, 0), (0, 4)]).moduli == (4,)
    assert present(0, []).moduli == ()


def test_integer_kernel():
    ker = integer_kernel([[1, 2, 3]], 1, 3)
    assert len(ker) == 2
    assert all(v[0] + 2 * v[1] + 3 * v[2] == 0 for v in ker)


def test_hnf_is_canonical():
    a = lattice_hnf([(2, 0), (0, 2)], 2)
    b = lattice_hnf([(2, 2), (0, 2), (4, 0)], 2)
    assert a == b
    assert abs_det([(2, 1), (0, 3)], 2) == 6


def test_span_and_extend():
    moduli = (2, 4)
    assert len(span_elements([(0, 2)], moduli)) == 2
    assert len(extend_span({(0, 0), (0, 2)}, (1, 1), moduli)) == 4
    assert len(mixed_radix_elements(moduli)) == 8


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=3, max_size=5))
def test_present_order_matches_index(rows):
    rels = [tuple(r) for r in rows] + [(12, 0, 0), (0, 12, 0), (0, 0, 12)]
    p = present(3, rels)
    order = 1
    for m in p.moduli:
        order *= m
    assert order == abs_det(rels, 3)
    # relations vanish in the presentation
    assert all(not any(p.coords(r)) for r in rels)
    # moduli form a divisor chain
    assert all(b % a == 0 for a, b in zip(p.moduli, p.moduli[1:]))
