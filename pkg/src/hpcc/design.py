"""t-designs: verification, block-count parameters, catalog and file format.

Points are 1-based.  Each block is kept as a sorted tuple, while the order of
the block list is preserved exactly as given, because HpPDA witnesses pick
"the i-th qualifying block" in list order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Iterable, Sequence

__all__ = [
    "TDesign",
    "OutOfRange",
    "UnknownDesign",
    "ParseError",
    "DesignInvalid",
    "verify_design",
    "lambda_s",
    "lambda_i_t",
    "count_containing",
    "count_containing_avoiding",
    "catalog",
    "CATALOG",
    "load_design",
    "parse_design",
    "format_design",
]


class OutOfRange(ValueError):
    pass


class UnknownDesign(KeyError):
    pass


class ParseError(ValueError):
    pass


class DesignInvalid(ValueError):
    def __init__(self, message: str, counterexample: tuple[int, ...] | None = None):
        super().__init__(message)
        self.counterexample = counterexample


@dataclass(frozen=True)
class TDesign:
    v: int
    k: int
    t: int
    lam: int
    blocks: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", tuple(tuple(sorted(b)) for b in self.blocks))

    @property
    def b(self) -> int:
        return len(self.blocks)

    def __str__(self) -> str:
        return self.name or f"{self.t}-({self.v},{self.k},{self.lam})"


def verify_design(v: int, blocks: Sequence[Iterable[int]], t: int, lam: int) -> tuple[int, ...] | None:
    """Return None if every t-subset of [v] lies in exactly ``lam`` blocks.

    Otherwise return the first t-subset (lex order) with the wrong count.
    Malformed blocks (repeats, points outside [v]) are reported as the
    offending block itself.
    """
    sets = [frozenset(b) for b in blocks]
    seen = set()
    for raw, s in zip(blocks, sets):
        raw = tuple(raw)
        if len(s) != len(raw) or any(not 1 <= p <= v for p in s) or s in seen:
            return tuple(sorted(raw))
        seen.add(s)
    for T in combinations(range(1, v + 1), t):
        ts = frozenset(T)
        if sum(ts <= s for s in sets) != lam:
            return T
    return None


def _check_s(design: TDesign, s: int) -> None:
    if not 0 <= s <= design.t:
        raise OutOfRange(f"index must lie in [0, {design.t}], got {s}")


def lambda_s(design: TDesign, s: int) -> int:
    """Number of blocks containing a fixed s-subset of points."""
    _check_s(design, s)
    num = design.lam * comb(design.v - s, design.t - s)
    den = comb(design.k - s, design.t - s)
    if num % den:
        raise ArithmeticError(f"lambda_{s} is not an integer for {design}")
    return num // den


def lambda_i_t(design: TDesign, i: int) -> int:
    """Blocks containing a fixed i-subset Y of a t-set T and avoiding T \\ Y."""
    _check_s(design, i)
    num = design.lam * comb(design.v - design.t, design.k - i)
    den = comb(design.v - design.t, design.k - design.t)
    if num % den:
        raise ArithmeticError(f"lambda_{i}^t is not an integer for {design}")
    return num // den


def count_containing(design: TDesign, points: Iterable[int]) -> int:
    ps = set(points)
    return sum(ps <= set(b) for b in design.blocks)


def count_containing_avoiding(design: TDesign, inside: Iterable[int], outside: Iterable[int]) -> int:
    ins, outs = set(inside), set(outside)
    return sum(ins <= set(b) and not (outs & set(b)) for b in design.blocks)


# Row orders follow the placement arrays printed for the 2-(7,3,1) and
# 3-(8,4,1) examples, rows 1..7 and 1..14 respectively.
_FANO = ((1, 2, 7), (1, 4, 5), (1, 3, 6), (4, 6, 7), (2, 5, 6), (3, 5, 7), (2, 3, 4))
_SQS8 = (
    (1, 2, 5, 6), (3, 4, 7, 8), (2, 4, 6, 8), (1, 3, 5, 7), (1, 4, 5, 8), (2, 3, 6, 7), (1, 2, 3, 4),
    (5, 6, 7, 8), (1, 2, 7, 8), (3, 4, 5, 6), (1, 3, 6, 8), (2, 4, 5, 7), (1, 4, 6, 7), (2, 3, 5, 8),
)

CATALOG = {
    "fano-7-3-1": TDesign(7, 3, 2, 1, _FANO, "fano-7-3-1"),
    "sqs-8-4-1": TDesign(8, 4, 3, 1, _SQS8, "sqs-8-4-1"),
}


def catalog(name: str) -> TDesign:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownDesign(f"unknown design {name!r}; known: {', '.join(CATALOG)}") from None


def format_design(design: TDesign) -> str:
    lines = [f"{design.v} {design.k} {design.t} {design.lam}"]
    lines += [" ".join(map(str, b)) for b in design.blocks]
    return "\n".join(lines) + "\n"


def parse_design(text: str, name: str = "") -> TDesign:
    """Parse the ``v k t lambda`` + one-block-per-line format and verify it."""
    header = None
    blocks: list[tuple[int, ...]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            nums = [int(x) for x in line.split()]
        except ValueError:
            raise ParseError(f"line {lineno}: expected integers, got {line!r}") from None
        if header is None:
            if len(nums) != 4 or min(nums) < 1:
                raise ParseError(f"line {lineno}: header must be 'v k t lambda'")
            header = nums
            continue
        v, k = header[0], header[1]
        if len(nums) != k:
            raise ParseError(f"line {lineno}: block has {len(nums)} points, expected {k}")
        if any(not 1 <= p <= v for p in nums):
            raise ParseError(f"line {lineno}: point outside [1, {v}]")
        if len(set(nums)) != k:
            raise ParseError(f"line {lineno}: repeated point in block")
        blocks.append(tuple(nums))
    if header is None:
        raise ParseError("missing header")
    if not blocks:
        raise ParseError("no blocks")
    v, k, t, lam = header
    if not v > k >= t:
        raise ParseError(f"need v > k >= t, got v={v} k={k} t={t}")
    bad = verify_design(v, blocks, t, lam)
    if bad is not None:
        raise DesignInvalid(f"not a {t}-({v},{k},{lam}) design: {bad} is a counterexample", bad)
    return TDesign(v, k, t, lam, tuple(blocks), name)


def load_design(path: str | Path) -> TDesign:
    path = Path(path)
    return parse_design(path.read_text(encoding="utf-8"), path.stem)
