from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hpcc.gf import (
    GF256,
    DuplicateEvaluationPoint,
    Field,
    FieldMatrix,
    NoSolution,
    Underdetermined,
    cauchy_matrix,
    default_polynomial,
    field_add,
    field_mul,
    is_irreducible,
    matmul,
    pivot_columns,
    rank,
    solve,
    square_submatrices,
)

elem = st.integers(0, 255)
nonzero = st.integers(1, 255)


def peasant(a, b, poly=0x11B, bits=8):
    """Shift-and-add multiplication with reduction at every step."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> bits:
            a ^= poly
    return out


def test_add_examples():
    assert field_add(0x53, 0x53) == 0
    assert field_add(0x0B, 0x0D) == 0x06
    assert field_add(0x7F, 0) == 0x7F


def test_mul_examples():
    assert field_mul(0x53, 0xCA) == 0x01
    assert field_mul(0x9E, 1) == 0x9E
    assert field_mul(0x9E, 0) == 0


def test_mul_table_matches_peasant():
    a = np.arange(256)
    for b in (0, 1, 2, 0x53, 0xCA, 0xFF):
        want = [peasant(int(x), b) for x in a]
        assert GF256.vmul(a, np.full(256, b)).tolist() == want


@settings(max_examples=300)
@given(elem, elem, elem)
def test_field_axioms(a, b, c):
    f = GF256
    assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    assert f.mul(a, b) == f.mul(b, a)


def test_every_nonzero_element_inverts():
    for a in range(1, 256):
        assert GF256.mul(a, GF256.inv(a)) == 1
    with pytest.raises(ZeroDivisionError):
        GF256.inv(0)


@pytest.mark.parametrize("bits", [1, 2, 3, 4, 5, 8, 9, 12, 16])
def test_default_polynomials_are_irreducible(bits):
    poly = default_polynomial(bits)
    assert poly.bit_length() == bits + 1
    assert is_irreducible(poly)


def test_reducible_polynomial_rejected():
    with pytest.raises(ValueError):
        Field(8, 0x100)  # x^8
    assert not is_irreducible(0b101)  # (x+1)^2


def test_large_field_inverse():
    f = Field(12, default_polynomial(12))
    for a in (1, 2, 3, 0x800, 0xFFF, 1234):
        assert f.mul(a, f.inv(a)) == 1


def test_cauchy_tiny_and_duplicates():
    f1 = Field(1, default_polynomial(1))
    assert cauchy_matrix(f1, [1], [0]).data.tolist() == [[1]]
    with pytest.raises(DuplicateEvaluationPoint):
        cauchy_matrix(GF256, [1, 1], [0])
    with pytest.raises(DuplicateEvaluationPoint):
        cauchy_matrix(GF256, [1, 2], [2])


@settings(max_examples=20, deadline=None)
@given(st.lists(elem, min_size=8, max_size=8, unique=True))
def test_cauchy_square_submatrices_full_rank(points):
    c = cauchy_matrix(GF256, points[:4], points[4:])
    count = 0
    for sub in square_submatrices(c):
        assert rank(sub) == sub.rows
        count += 1
    assert count == 4 ** 2 + 6 ** 2 + 4 ** 2 + 1


def test_rank_examples():
    assert rank(FieldMatrix.zeros(GF256, 3, 3)) == 0
    assert rank(FieldMatrix.identity(GF256, 4)) == 4
    assert rank(cauchy_matrix(GF256, range(8), range(8, 16))) == 8
    assert rank(FieldMatrix(GF256, np.zeros((0, 0), dtype=np.int64))) == 0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6), st.integers(1, 6))
def test_rank_invariant_under_row_operations(seed, r, c):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 256, size=(r, c))
    base = rank(FieldMatrix(GF256, a))
    assert 0 <= base <= min(r, c)
    b = a[rng.permutation(r)]
    assert rank(FieldMatrix(GF256, b)) == base
    if r >= 2:
        i, j = rng.choice(r, size=2, replace=False)
        alpha = int(rng.integers(1, 256))
        b = a.copy()
        b[i] ^= GF256.vmul(np.full(c, alpha), a[j])
        assert rank(FieldMatrix(GF256, b)) == base


def test_rank_of_dependent_rows():
    row = np.array([3, 7, 11, 200])
    a = np.vstack([row, GF256.vmul(np.full(4, 9), row), [1, 0, 0, 0]])
    assert rank(FieldMatrix(GF256, a)) == 2


def test_solve_identity():
    v = np.array([5, 0, 255, 17])
    assert solve(FieldMatrix.identity(GF256, 4), v).tolist() == v.tolist()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 10))
def test_solve_cauchy_substitutes_back(seed, n):
    rng = np.random.default_rng(seed)
    c = cauchy_matrix(GF256, range(n), range(n, 2 * n))
    rhs = rng.integers(0, 256, size=n)
    x = solve(c, rhs)
    assert matmul(GF256, c.data, x.reshape(n, 1)).ravel().tolist() == rhs.tolist()


def test_solve_errors():
    with pytest.raises(Underdetermined):
        solve(FieldMatrix(GF256, [[1, 0, 0], [0, 1, 0]]), [1, 2])
    with pytest.raises(NoSolution):
        solve(FieldMatrix(GF256, [[1], [1]]), [1, 2])


def test_solve_matrix_rhs():
    c = cauchy_matrix(GF256, range(3), range(3, 6))
    rhs = np.arange(6).reshape(3, 2)
    x = solve(c, rhs)
    assert matmul(GF256, c.data, x).tolist() == rhs.tolist()


def test_pivot_columns_respects_order():
    m = FieldMatrix(GF256, [[1, 1, 0], [0, 1, 1]])
    assert pivot_columns(m) == [0, 1]
    # with column 2 first, pivots are reported as positions in the order
    assert pivot_columns(m, [2, 0, 1]) == [0, 1]
    # prefix-rank identity: pivots before position c = rank of the first c columns
    order = [1, 2, 0]
    piv = pivot_columns(m, order)
    for c in range(4):
        assert sum(p < c for p in piv) == rank(FieldMatrix(GF256, m.data[:, order[:c]].reshape(2, c)))


def test_field_matrix_is_immutable_and_compares_by_value():
    a = FieldMatrix(GF256, [[1, 2], [3, 4]])
    assert a == FieldMatrix(GF256, np.array([[1, 2], [3, 4]]))
    with pytest.raises(ValueError):
        a.data[0, 0] = 9
    with pytest.raises(ValueError):
        FieldMatrix(GF256, [[256]])
    assert (a @ FieldMatrix.identity(GF256, 2)) == a
    assert a.transpose().data.tolist() == [[1, 3], [2, 4]]


def test_square_submatrix_enumeration_is_exhaustive():
    m = FieldMatrix.identity(GF256, 3)
    subs = list(square_submatrices(m, 2))
    assert len(subs) == 9 + 9
    assert sum(1 for s in subs if s.rows == 2 and rank(s) == 2) == len(list(combinations(range(3), 2)))
