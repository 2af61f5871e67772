"""Ramp (non-perfect) secret sharing with Cauchy matrices and MDS coded shares.

A file of ``n - m`` parts is stacked with ``m`` uniform keys and multiplied by
an n x n Cauchy matrix A, giving n shares; any m shares reveal nothing about
the parts.  The shares are then expanded to F coded shares with a
systematic generator ``G = [I_n | C]``, so any n coded shares determine the
shares.

C is chosen so that the composed map ``G^T A`` (coded share as a function of
parts and keys) is itself an F x n Cauchy matrix with evaluation points
``xs = 0..n-1, 2n..n+F-1`` and ``ys = n..2n-1``.  Any m coded shares then see
an invertible m x m block of key coefficients, so a cache holding m coded
shares learns nothing.  An arbitrary MDS parity block does not give this.  All payloads are
``(part_len,)`` integer vectors over the field; every operation acts
coordinate-wise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .gf import GF256, Field, FieldMatrix, cauchy_matrix, matmul, rank, solve

__all__ = [
    "FileVector",
    "KeyVector",
    "CodedShare",
    "SharingSpec",
    "FieldTooSmall",
    "DimensionMismatch",
    "InsufficientShares",
    "SingularSelection",
    "make_sharing_spec",
    "share_file",
    "mds_extend",
    "reconstruct_file",
    "reconstruct_shares",
    "share_leakage",
]


class FieldTooSmall(ValueError):
    def __init__(self, required: int, field: Field):
        super().__init__(f"{field!r} has {field.order} elements, need at least {required}")
        self.required = required


class DimensionMismatch(ValueError):
    pass


class InsufficientShares(ValueError):
    pass


class SingularSelection(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class FileVector:
    index: int
    parts: np.ndarray  # (n - m, part_len)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FileVector):
            return NotImplemented
        return self.index == other.index and np.array_equal(self.parts, other.parts)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class KeyVector:
    label: object
    payload: np.ndarray


@dataclass(frozen=True, eq=False)
class CodedShare:
    file_index: int
    row: int  # 1-based coded-share index f
    payload: np.ndarray


@dataclass(frozen=True, eq=False)
class SharingSpec:
    m: int
    n: int
    F: int
    field: Field
    A: FieldMatrix
    G: FieldMatrix
    part_len: int = 1

    @property
    def parts(self) -> int:
        return self.n - self.m

    def coded_coefficients(self) -> np.ndarray:
        """F x n matrix: coded share f as a combination of (parts, keys)."""
        return matmul(self.field, self.G.data.T, self.A.data)


def make_sharing_spec(m: int, n: int, F: int, field: Field = GF256, part_len: int = 1) -> SharingSpec:
    if not (F >= n > m >= 0):
        raise ValueError(f"need F >= n > m >= 0, got m={m} n={n} F={F}")
    required = n + F
    if field.order < required:
        raise FieldTooSmall(required, field)
    A = cauchy_matrix(field, range(n), range(n, 2 * n))
    G = FieldMatrix.identity(field, n)
    if F > n:
        # parity rows H A^-1, so that G^T A stacks A over H
        H = cauchy_matrix(field, range(2 * n, n + F), range(n, 2 * n))
        parity = solve(A.transpose(), H.transpose().data)
        G = G.hstack(FieldMatrix(field, parity))
    return SharingSpec(m, n, F, field, A, G, part_len)


def _as_block(vectors, rows: int, part_len: int, what: str) -> np.ndarray:
    arr = np.asarray([np.asarray(getattr(v, "payload", v), dtype=np.int64) for v in vectors], dtype=np.int64)
    arr = arr.reshape(len(arr), -1) if len(arr) else np.zeros((0, part_len), dtype=np.int64)
    if arr.shape != (rows, part_len):
        raise DimensionMismatch(f"{what}: expected shape {(rows, part_len)}, got {arr.shape}")
    return arr


def share_file(spec: SharingSpec, file: FileVector, keys: Sequence[KeyVector | np.ndarray]) -> np.ndarray:
    """The n shares of ``file`` as an (n, part_len) array: A @ [parts; keys]."""
    parts = _as_block(file.parts, spec.parts, spec.part_len, "file parts")
    key_block = _as_block(keys, spec.m, spec.part_len, "keys")
    return matmul(spec.field, spec.A.data, np.vstack([parts, key_block]))


def mds_extend(spec: SharingSpec, shares: np.ndarray, file_index: int = 0) -> list[CodedShare]:
    shares = _as_block(shares, spec.n, spec.part_len, "shares")
    coded = matmul(spec.field, spec.G.data.T, shares)
    return [CodedShare(file_index, f + 1, coded[f]) for f in range(spec.F)]


def reconstruct_shares(spec: SharingSpec, coded: Iterable[CodedShare]) -> np.ndarray:
    chosen: dict[int, CodedShare] = {}
    for c in coded:
        chosen.setdefault(c.row, c)
    if len(chosen) < spec.n:
        raise InsufficientShares(f"{len(chosen)} distinct coded shares, need {spec.n}")
    rows = sorted(chosen)[:spec.n]
    sub = spec.G.submatrix(range(spec.n), [f - 1 for f in rows]).transpose()
    rhs = np.vstack([np.asarray(chosen[f].payload, dtype=np.int64).reshape(1, -1) for f in rows])
    try:
        return solve(sub, rhs)
    except ArithmeticError as exc:
        raise SingularSelection(f"generator columns {rows} are singular") from exc


def reconstruct_file(spec: SharingSpec, coded: Iterable[CodedShare], file_index: int = 0) -> tuple[FileVector, np.ndarray]:
    """Recover (file, keys) from any n coded shares with distinct rows."""
    shares = reconstruct_shares(spec, coded)
    stack = solve(spec.A, shares)
    return FileVector(file_index, stack[:spec.parts]), stack[spec.parts:]


def share_leakage(spec: SharingSpec, rows: Sequence[int], coded: bool = False) -> int:
    """Information (in field symbols per coordinate) that the given shares carry about the parts.

    ``rows`` are 0-based share indices, or coded-share indices when ``coded``.
    """
    coef = spec.coded_coefficients() if coded else spec.A.data
    sub = FieldMatrix(spec.field, coef[list(rows)].reshape(len(rows), spec.n))
    keys_only = FieldMatrix(spec.field, sub.data[:, spec.parts:])
    return rank(sub) - rank(keys_only)

