"""Arithmetic and linear algebra over GF(2^l).

Elements are plain ints in ``[0, 2**l)``; matrices wrap a read-only numpy
array together with the field they live in.  Scalar multiplication is a
carry-less product reduced modulo the field polynomial, inversion uses the
extended Euclidean algorithm on polynomials.  For l <= 8 a full product table
is built once and used by the vectorised row operations.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numba
import numpy as np

__all__ = [
    "Field",
    "FieldMatrix",
    "DuplicateEvaluationPoint",
    "NoSolution",
    "Underdetermined",
    "GF256",
    "field_add",
    "field_mul",
    "cauchy_matrix",
    "rank",
    "solve",
    "pivot_columns",
]

MAX_BITS = 16


class DuplicateEvaluationPoint(ValueError):
    pass


class NoSolution(ArithmeticError):
    pass


class Underdetermined(ArithmeticError):
    pass


def _degree(p: int) -> int:
    return p.bit_length() - 1


def _clmul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def _polymod(a: int, m: int) -> int:
    dm = _degree(m)
    while a and _degree(a) >= dm:
        a ^= m << (_degree(a) - dm)
    return a


def _polydivmod(a: int, m: int) -> tuple[int, int]:
    q = 0
    dm = _degree(m)
    while a and _degree(a) >= dm:
        shift = _degree(a) - dm
        q ^= 1 << shift
        a ^= m << shift
    return q, a


def is_irreducible(poly: int) -> bool:
    """Exhaustive trial division by every polynomial of degree 1..deg/2."""
    d = _degree(poly)
    if d < 1:
        return False
    for cand in range(2, 1 << (d // 2 + 1)):
        if _polymod(poly, cand) == 0:
            return False
    return True


def default_polynomial(bits: int) -> int:
    """Smallest irreducible polynomial of the given degree (0x11B for l=8)."""
    for poly in range(1 << bits, 1 << (bits + 1)):
        if is_irreducible(poly):
            return poly
    raise ValueError(f"no irreducible polynomial of degree {bits}")  # pragma: no cover


@dataclass(frozen=True)
class Field:
    """GF(2^bits) with the given reduction polynomial (bitmask incl. x^bits)."""

    bits: int = 8
    poly: int = 0

    def __post_init__(self) -> None:
        if not 1 <= self.bits <= MAX_BITS:
            raise ValueError(f"bit width must be in 1..{MAX_BITS}, got {self.bits}")
        if self.poly == 0:
            object.__setattr__(self, "poly", default_polynomial(self.bits))
        if _degree(self.poly) != self.bits:
            raise ValueError(f"polynomial {self.poly:#x} does not have degree {self.bits}")
        if not is_irreducible(self.poly):
            raise ValueError(f"polynomial {self.poly:#x} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.bits

    def __repr__(self) -> str:
        return f"GF(2^{self.bits}, poly={self.poly:#x})"

    def _check(self, a: int) -> int:
        a = operator.index(a)
        if not 0 <= a < self.order:
            raise ValueError(f"{a} is not an element of {self!r}")
        return a

    def add(self, a: int, b: int) -> int:
        return self._check(a) ^ self._check(b)

    def mul(self, a: int, b: int) -> int:
        return _polymod(_clmul(self._check(a), self._check(b)), self.poly)

    def inv(self, a: int) -> int:
        a = self._check(a)
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        # extended Euclid: track s with s*a = r (mod poly)
        r0, r1 = self.poly, a
        s0, s1 = 0, 1
        while r1:
            q, r = _polydivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 ^ _clmul(q, s1)
        # r0 == 1 because poly is irreducible
        return _polymod(s0, self.poly)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def elements(self) -> range:
        return range(self.order)

    @cached_property
    def _mul_table(self) -> np.ndarray | None:
        if self.bits > 8:
            return None
        q = self.order
        table = np.zeros((q, q), dtype=np.uint8)
        for a in range(1, q):
            for b in range(a, q):
                table[a, b] = table[b, a] = self.mul(a, b)
        return table

    @cached_property
    def _kernel_table(self) -> np.ndarray:
        table = self._mul_table
        return np.zeros((1, 1), dtype=np.int64) if table is None else table.astype(np.int64)

    @cached_property
    def _inv_table(self) -> np.ndarray:
        inv = np.zeros(self.order, dtype=np.int64)
        for a in range(1, self.order):
            inv[a] = self.inv(a)
        return inv

    def vmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise product of broadcastable integer arrays."""
        table = self._mul_table
        if table is not None:
            return table[a, b].astype(np.int64)
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        a = a.copy()
        b = b.copy()
        out = np.zeros_like(a)
        high = 1 << self.bits
        for _ in range(self.bits):
            out ^= np.where(b & 1, a, 0)
            b >>= 1
            a <<= 1
            a = np.where(a & high, a ^ self.poly, a)
        return out

    def vinv(self, a: np.ndarray) -> np.ndarray:
        return self._inv_table[a]

    def dot(self, coeffs: np.ndarray, vectors: np.ndarray) -> np.ndarray:
        """Field linear combination: ``coeffs`` (k,) times ``vectors`` (k, L)."""
        coeffs = np.asarray(coeffs, dtype=np.int64)
        vectors = np.asarray(vectors, dtype=np.int64)
        if vectors.ndim == 1:
            vectors = vectors[:, None]
        prods = self.vmul(coeffs[:, None], vectors)
        return np.bitwise_xor.reduce(prods, axis=0) if len(coeffs) else np.zeros(vectors.shape[1], dtype=np.int64)


GF256 = Field(8, 0x11B)


def field_add(a: int, b: int, field: Field = GF256) -> int:
    return field.add(a, b)


def field_mul(a: int, b: int, field: Field = GF256) -> int:
    return field.mul(a, b)


@dataclass(frozen=True, eq=False)
class FieldMatrix:
    field: Field
    data: np.ndarray = dc_field(repr=False)

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=np.int64, copy=True)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= self.field.order):
            raise ValueError(f"entries outside {self.field!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> FieldMatrix:
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field: Field, n: int) -> FieldMatrix:
        return cls(field, np.eye(n, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __getitem__(self, idx):
        return self.data[idx]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.data, other.data)

    def __repr__(self) -> str:
        return f"FieldMatrix({self.rows}x{self.cols} over {self.field!r})"

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> FieldMatrix:
        return FieldMatrix(self.field, self.data[np.ix_(list(rows), list(cols))])

    def transpose(self) -> FieldMatrix:
        return FieldMatrix(self.field, self.data.T)

    def __matmul__(self, other: FieldMatrix) -> FieldMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return FieldMatrix(self.field, matmul(self.field, self.data, other.data))

    def hstack(self, other: FieldMatrix) -> FieldMatrix:
        return FieldMatrix(self.field, np.hstack([self.data, other.data]))

    def rank(self) -> int:
        return rank(self)


def matmul(field: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(a.shape[1]):
        out ^= field.vmul(a[:, k][:, None], b[k][None, :])
    return out


def cauchy_matrix(field: Field, xs: Sequence[int], ys: Sequence[int]) -> FieldMatrix:
    """Matrix with entry (i, j) = 1 / (xs[i] - ys[j]); subtraction is XOR here."""
    xs, ys = list(xs), list(ys)
    if len(set(xs)) != len(xs) or len(set(ys)) != len(ys):
        raise DuplicateEvaluationPoint("evaluation points must be distinct")
    if set(xs) & set(ys):
        raise DuplicateEvaluationPoint(f"xs and ys share points {sorted(set(xs) & set(ys))}")
    for v in xs + ys:
        field._check(v)
    data = [[field.inv(x ^ y) for y in ys] for x in xs]
    return FieldMatrix(field, np.array(data, dtype=np.int64).reshape(len(xs), len(ys)))


@numba.njit(cache=True)
def _gmul(a, b, table, poly, bits):
    if table.shape[0] > 1:
        return table[a, b]
    r = 0
    high = 1 << bits
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & high:
            a ^= poly
    return r


@numba.njit(cache=True)
def _echelon_kernel(a, table, inv, poly, bits):
    rows, cols = a.shape
    pivots = np.empty(min(rows, cols), np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = -1
        for i in range(r, rows):
            if a[i, c] != 0:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for j in range(c, cols):
                tmp = a[r, j]
                a[r, j] = a[p, j]
                a[p, j] = tmp
        lead = inv[a[r, c]]
        if lead != 1:
            for j in range(c, cols):
                a[r, j] = _gmul(lead, a[r, j], table, poly, bits)
        for i in range(r + 1, rows):
            f = a[i, c]
            if f != 0:
                for j in range(c, cols):
                    a[i, j] ^= _gmul(f, a[r, j], table, poly, bits)
        pivots[r] = c
        r += 1
    return pivots[:r]


def _echelon(field: Field, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Row echelon form with unit pivots; first nonzero row is the pivot."""
    a = np.array(a, dtype=np.int64, copy=True)
    if a.size == 0:
        return a, []
    pivots = _echelon_kernel(a, field._kernel_table, field._inv_table, field.poly, field.bits)
    return a, [int(p) for p in pivots]


def pivot_columns(m: FieldMatrix, column_order: Sequence[int] | None = None) -> list[int]:
    """Pivot positions of an echelon form of ``m`` with columns taken in ``column_order``.

    The number of pivots before position ``c`` equals the rank of the first
    ``c`` reordered columns, so one elimination answers every prefix-rank query.
    """
    data = m.data if column_order is None else m.data[:, list(column_order)]
    if data.size == 0:
        return []
    return _echelon(m.field, data)[1]


def rank(m: FieldMatrix) -> int:
    return len(pivot_columns(m))


def solve(m: FieldMatrix, rhs: Iterable[int]) -> np.ndarray:
    """Unique solution of ``m x = rhs``.

    Raises NoSolution for an inconsistent system and Underdetermined when the
    columns of ``m`` are dependent.
    """
    rhs = np.asarray(list(rhs), dtype=np.int64)
    if rhs.shape[0] != m.rows:
        raise ValueError(f"rhs has length {rhs.shape[0]}, expected {m.rows}")
    aug = np.hstack([m.data, rhs.reshape(m.rows, -1)])
    k = aug.shape[1] - m.cols
    red, pivots = _echelon(m.field, aug)
    if any(p >= m.cols for p in pivots):
        raise NoSolution("inconsistent system")
    if len(pivots) < m.cols:
        raise Underdetermined(f"rank {len(pivots)} < {m.cols} unknowns")
    # back substitution on the unit-pivot echelon form
    field = m.field
    x = np.zeros((m.cols, k), dtype=np.int64)
    for i in range(m.cols - 1, -1, -1):
        acc = red[i, m.cols:].copy()
        if i + 1 < m.cols:
            acc ^= np.bitwise_xor.reduce(field.vmul(red[i, i + 1:m.cols][:, None], x[i + 1:]), axis=0)
        x[i] = acc
    return x[:, 0] if rhs.ndim == 1 else x


def square_submatrices(m: FieldMatrix, max_size: int | None = None):
    """Yield every square submatrix up to ``max_size`` (default: min dimension)."""
    top = min(m.rows, m.cols) if max_size is None else min(max_size, m.rows, m.cols)
    for size in range(1, top + 1):
        for rs in combinations(range(m.rows), size):
            for cs in combinations(range(m.cols), size):
                yield m.submatrix(rs, cs)
