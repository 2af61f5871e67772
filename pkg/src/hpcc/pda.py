"""Placement delivery arrays.

A PDA is an F x K array over ``{"*"} ∪ {1..S}``: the stars of column ``k`` are
the subfiles user ``k`` caches, and every integer is one coded multicast.
Cells are stored as ``STAR``, ``None`` (null, only meaningful for placement
arrays) or a positive ``int``.  Coordinates in violation reports are 0-based
``(row, col)`` pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Hashable, Sequence

import numpy as np

__all__ = [
    "STAR",
    "Pda",
    "PdaParams",
    "Violation",
    "RatePoint",
    "InvalidT",
    "verify_pda",
    "man_pda",
    "baseline_point",
    "format_array",
    "parse_array",
    "subsets",
]

STAR = "*"
NULL = None


class InvalidT(ValueError):
    pass


class ArrayParseError(ValueError):
    pass


@dataclass(frozen=True)
class PdaParams:
    K: int
    F: int
    Z: int
    S: int

    def __str__(self) -> str:
        return f"PDA K={self.K} F={self.F} Z={self.Z} S={self.S}"


@dataclass(frozen=True)
class Violation:
    """First failed PDA condition (0 = malformed cell) with witness cells."""

    condition: int
    message: str
    cells: tuple[tuple[int, int], ...] = ()

    def __bool__(self) -> bool:
        return False

    def __str__(self) -> str:
        return f"C{self.condition} violated: {self.message}"


@dataclass(frozen=True)
class RatePoint:
    """Achievable (memory, rate) pair in file units, kept as exact rationals."""

    M: Fraction
    R: Fraction
    scheme: str = ""
    param: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "M", Fraction(self.M))
        object.__setattr__(self, "R", Fraction(self.R))


def subsets(items: Sequence[int], size: int) -> list[tuple[int, ...]]:
    """``size``-subsets of ``items`` in lexicographic order."""
    return list(combinations(sorted(items), size))


def _is_int(cell) -> bool:
    return isinstance(cell, (int, np.integer)) and not isinstance(cell, bool)


def verify_pda(cells: Sequence[Sequence]) -> PdaParams | Violation:
    """Check the three PDA conditions on a star/integer array.

    Returns the parameters when all hold, otherwise the first violation found
    (conditions are checked in order, occurrences in row-major order).
    """
    rows = [list(r) for r in cells]
    if not rows or not rows[0]:
        return Violation(0, "empty array")
    K = len(rows[0])
    for j, row in enumerate(rows):
        if len(row) != K:
            return Violation(0, f"row {j + 1} has {len(row)} cells, expected {K}", ((j, 0),))
        for k, c in enumerate(row):
            if c != STAR and not (_is_int(c) and c >= 1):
                return Violation(0, f"cell ({j + 1},{k + 1}) is {c!r}, not a star or positive integer", ((j, k),))
    F = len(rows)

    stars = [sum(rows[j][k] == STAR for j in range(F)) for k in range(K)]
    Z = stars[0]
    for k, z in enumerate(stars):
        if z != Z:
            return Violation(1, f"column {k + 1} has {z} stars, column 1 has {Z}", ((0, k),))

    where: dict[int, list[tuple[int, int]]] = {}
    for j in range(F):
        for k in range(K):
            c = rows[j][k]
            if c != STAR:
                where.setdefault(int(c), []).append((j, k))
    S = max(where, default=0)
    for s in range(1, S + 1):
        if s not in where:
            return Violation(2, f"integer {s} does not occur")

    for s in sorted(where):
        for (j1, k1), (j2, k2) in combinations(where[s], 2):
            if j1 == j2 or k1 == k2:
                return Violation(3, f"integer {s} repeated in the same row or column", ((j1, k1), (j2, k2)))
            if rows[j1][k2] != STAR or rows[j2][k1] != STAR:
                return Violation(3, f"integer {s} at ({j1 + 1},{k1 + 1}) and ({j2 + 1},{k2 + 1}) lacks the star complement",
                                 ((j1, k1), (j2, k2)))
    return PdaParams(K, F, Z, S)


@dataclass(frozen=True, eq=False)
class Pda:
    """A validated PDA.

    ``row_labels`` names the rows (t-subsets for MAN arrays) and
    ``int_labels[s - 1]`` names integer ``s`` (the (t+1)-subset it serves).
    """

    cells: tuple[tuple, ...]
    row_labels: tuple[Hashable, ...] = ()
    int_labels: tuple[Hashable, ...] = ()
    params: PdaParams = field(init=False)

    def __post_init__(self) -> None:
        cells = tuple(tuple(int(c) if _is_int(c) else c for c in row) for row in self.cells)
        object.__setattr__(self, "cells", cells)
        result = verify_pda(cells)
        if isinstance(result, Violation):
            raise ValueError(f"not a PDA: {result}")
        object.__setattr__(self, "params", result)

    K = property(lambda self: self.params.K)
    F = property(lambda self: self.params.F)
    Z = property(lambda self: self.params.Z)
    S = property(lambda self: self.params.S)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pda):
            return NotImplemented
        return self.cells == other.cells

    def __hash__(self) -> int:
        return hash(self.cells)

    def star_mask(self) -> np.ndarray:
        return np.array([[c == STAR for c in row] for row in self.cells], dtype=bool).reshape(self.F, self.K)

    def occurrences(self, s: int) -> list[tuple[int, int]]:
        return [(j, k) for j, row in enumerate(self.cells) for k, c in enumerate(row) if c == s]

    def is_regular(self) -> int | None:
        """Common occurrence count g if every integer appears g times."""
        counts = {s: 0 for s in range(1, self.S + 1)}
        for row in self.cells:
            for c in row:
                if c != STAR:
                    counts[c] += 1
        values = set(counts.values())
        return values.pop() if len(values) == 1 else None

    def to_text(self) -> str:
        return format_array(self.cells)


def man_pda(K: int, t: int) -> Pda:
    """MAN-PDA: rows are t-subsets of [K] in lex order, integers rank (t+1)-subsets."""
    if not 0 <= t <= K:
        raise InvalidT(f"t must lie in [0, {K}], got {t}")
    rows = subsets(range(1, K + 1), t)
    blocks = subsets(range(1, K + 1), t + 1)
    rank = {b: i + 1 for i, b in enumerate(blocks)}
    cells = []
    for T in rows:
        cells.append(tuple(STAR if k in T else rank[tuple(sorted(T + (k,)))] for k in range(1, K + 1)))
    return Pda(tuple(cells), row_labels=tuple(rows), int_labels=tuple(blocks))


def baseline_point(K: int, t: int, N: int) -> RatePoint:
    """(M, R) of the secretive PDA scheme on man_pda(K, t), counted on the array."""
    pda = man_pda(K, t)
    if pda.F == pda.Z:
        raise InvalidT(f"t={t} leaves no uncached subfiles for K={K}")
    stars = int(pda.star_mask()[:, 0].sum())
    missing = pda.F - stars
    return RatePoint(Fraction(N * stars, missing) + 1, Fraction(pda.S, missing), "baseline", f"t={t}")


def format_array(cells: Sequence[Sequence]) -> str:
    out = []
    for row in cells:
        out.append(" ".join("-" if c is None else str(c) for c in row))
    return "\n".join(out) + "\n"


def parse_array(text: str) -> list[list]:
    """Inverse of :func:`format_array`; blank lines and ``#`` comments are skipped."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        row = []
        for tok in line.split():
            if tok == "*":
                row.append(STAR)
            elif tok == "-":
                row.append(None)
            elif tok.isdigit():
                row.append(int(tok))
            else:
                raise ArrayParseError(f"line {lineno}: bad cell {tok!r}")
        rows.append(row)
    if not rows:
        raise ArrayParseError("no rows")
    return rows
