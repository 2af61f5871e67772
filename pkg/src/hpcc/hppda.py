"""Hotplug placement delivery arrays.

An HpPDA is a pair (P, B): P is an F x K star/null placement array for all K
users, B is a PDA for K' users, and every K'-subset tau of the users has a
row selection zeta with ``P[zeta, tau]`` star-equal to B.

Three kinds are supported:

* ``man``      rows of P are t-subsets of [K], B = man_pda(K', t)
* ``tdesign``  rows of P are the blocks of a t-design, B rows are pairs (Y, i)
* ``baseline`` P = B = man_pda(K, t) with every user active (K' = K)

The active users tau are always handled in sorted order, so the map from
B-column positions to users (Phi) is the order-preserving bijection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Sequence

import numpy as np

from .design import TDesign, lambda_i_t
from .pda import STAR, Pda, format_array, man_pda, parse_array, subsets

__all__ = [
    "HpPda",
    "FilledSubarray",
    "InvalidParameters",
    "MultiplicityOutOfRange",
    "WitnessNotFound",
    "HppdaParseError",
    "man_hppda",
    "tdesign_hppda",
    "baseline_hppda",
    "witness",
    "fill",
    "verify_hppda",
    "format_hppda",
    "parse_hppda",
]


class InvalidParameters(ValueError):
    pass


class MultiplicityOutOfRange(ValueError):
    pass


class WitnessNotFound(RuntimeError):
    pass


class HppdaParseError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HpPda:
    kind: str
    P: np.ndarray
    B: Pda
    t: int
    row_labels: tuple[Hashable, ...]
    b_row_labels: tuple[Hashable, ...]
    design: TDesign | None = None
    a: tuple[int, ...] = ()
    Z: int = field(init=False)

    def __post_init__(self) -> None:
        P = np.array(self.P, dtype=bool)
        if P.ndim != 2:
            raise InvalidParameters("P must be a 2-d star mask")
        P.setflags(write=False)
        object.__setattr__(self, "P", P)
        col_stars = P.sum(axis=0)
        if len(set(col_stars.tolist())) != 1:
            raise InvalidParameters(f"columns of P have unequal star counts {col_stars.tolist()}")
        object.__setattr__(self, "Z", int(col_stars[0]))
        if self.B.K > P.shape[1] or self.B.F > P.shape[0]:
            raise InvalidParameters("B is larger than P")
        if len(self.row_labels) != P.shape[0] or len(self.b_row_labels) != self.B.F:
            raise InvalidParameters("row label count mismatch")

    K = property(lambda self: self.P.shape[1])
    F = property(lambda self: self.P.shape[0])
    Kp = property(lambda self: self.B.K)
    Fp = property(lambda self: self.B.F)
    Zp = property(lambda self: self.B.Z)
    S = property(lambda self: self.B.S)

    @property
    def params(self) -> tuple[int, int, int, int, int, int, int]:
        """(K, K', F, F', Z, Z', S) as measured on the arrays."""
        return (self.K, self.Kp, self.F, self.Fp, self.Z, self.Zp, self.S)

    def __str__(self) -> str:
        return f"({','.join(map(str, self.params))})-HpPDA[{self.kind}]"

    def p_cells(self) -> list[list]:
        return [[STAR if x else None for x in row] for row in self.P]


@dataclass(frozen=True)
class FilledSubarray:
    """P restricted to (zeta, tau) with B's integers written in as labels.

    ``cells[r][j]`` is STAR or the transmission label for B-row ``r`` and
    active user ``tau[j]``.  Labels are user subsets for ``man``, pairs
    (Y, i) in [t]-coordinates for ``tdesign`` and integers for ``baseline``.
    """

    tau: tuple[int, ...]
    zeta: tuple[int, ...]
    cells: tuple[tuple, ...]

    def phi(self, positions: Sequence[int]) -> tuple[int, ...]:
        """Map 1-based B-column positions to user indices."""
        return tuple(self.tau[p - 1] for p in positions)

    def labels(self) -> list:
        """Distinct labels in first-appearance (row-major) order."""
        seen = {}
        for row in self.cells:
            for c in row:
                if c != STAR and c not in seen:
                    seen[c] = None
        return list(seen)

    def cells_with(self, label) -> list[tuple[int, int]]:
        """(zeta row, active user) pairs whose cell carries ``label``."""
        return [(self.zeta[r], self.tau[j]) for r, row in enumerate(self.cells) for j, c in enumerate(row) if c == label]


def man_hppda(K: int, Kp: int, t: int) -> HpPda:
    if not (1 <= Kp <= K and 0 <= t <= Kp - 1):
        raise InvalidParameters(f"need 1 <= K' <= K and 0 <= t <= K'-1, got K={K} K'={Kp} t={t}")
    B = man_pda(Kp, t)
    return HpPda(
        "man", man_pda(K, t).star_mask(), B, t,
        row_labels=tuple(subsets(range(1, K + 1), t)),
        b_row_labels=B.row_labels,
    )


def baseline_hppda(K: int, t: int) -> HpPda:
    """The classical PDA scheme viewed as an HpPDA with every user active."""
    if not 0 <= t <= K - 1:
        raise InvalidParameters(f"need 0 <= t <= K-1, got K={K} t={t}")
    B = man_pda(K, t)
    return HpPda("baseline", B.star_mask(), B, t, row_labels=B.row_labels, b_row_labels=B.row_labels)


def _tdesign_b_rows(t: int, a: Sequence[int]) -> list[tuple[tuple[int, ...], int]]:
    # Largest Y first; for |Y| = t-1 the copy index is the outer loop.
    rows = []
    for s in range(t - 1, 0, -1):
        a_s = a[s - 1]
        ys = subsets(range(1, t + 1), s)
        if s == t - 1:
            rows += [(Y, i) for i in range(1, a_s + 1) for Y in ys]
        else:
            rows += [(Y, i) for Y in ys for i in range(1, a_s + 1)]
    return rows


def _tdesign_b(t: int, a: Sequence[int], rows=None) -> Pda:
    rows = _tdesign_b_rows(t, a) if rows is None else rows
    numbering: dict = {}
    cells = []
    for Y, i in rows:
        row = []
        for j in range(1, t + 1):
            if j in Y:
                row.append(STAR)
            else:
                label = (tuple(sorted(Y + (j,))), i)
                row.append(numbering.setdefault(label, len(numbering) + 1))
        cells.append(tuple(row))
    return Pda(tuple(cells), row_labels=tuple(rows), int_labels=tuple(numbering))


def tdesign_hppda(design: TDesign, a: Sequence[int]) -> HpPda:
    t = design.t
    a = tuple(int(x) for x in a)
    if t < 2:
        raise InvalidParameters("t-design HpPDAs need t >= 2")
    if len(a) != t - 1:
        raise InvalidParameters(f"need {t - 1} multiplicities a_1..a_{t - 1}, got {len(a)}")
    for s, a_s in enumerate(a, 1):
        bound = lambda_i_t(design, s)
        if not 0 <= a_s <= bound:
            raise MultiplicityOutOfRange(f"a_{s}={a_s} must lie in [0, lambda_{s}^t = {bound}]")
    if not any(a):
        raise MultiplicityOutOfRange("at least one multiplicity must be positive")
    P = np.zeros((design.b, design.v), dtype=bool)
    for f, block in enumerate(design.blocks):
        P[f, [p - 1 for p in block]] = True
    B = _tdesign_b(t, a)
    return HpPda("tdesign", P, B, t, row_labels=design.blocks, b_row_labels=B.row_labels, design=design, a=a)


def _check_tau(hp: HpPda, tau: Sequence[int]) -> tuple[int, ...]:
    tau = tuple(sorted(int(u) for u in tau))
    if len(tau) != hp.Kp or len(set(tau)) != len(tau) or any(not 1 <= u <= hp.K for u in tau):
        raise ValueError(f"active set must be {hp.Kp} distinct users from [1, {hp.K}], got {tau}")
    return tau


def _select_rows(hp: HpPda, tau: tuple[int, ...]) -> tuple[int, ...]:
    """0-based P rows aligned with B's rows, before the pattern check."""
    if hp.kind in ("man", "baseline"):
        index = {T: f for f, T in enumerate(hp.row_labels)}
        return tuple(index[tuple(tau[p - 1] for p in T)] for T in hp.b_row_labels)
    if hp.kind == "tdesign":
        zeta = []
        for Y, i in hp.b_row_labels:
            inside = {tau[p - 1] for p in Y}
            outside = {tau[p - 1] for p in range(1, hp.t + 1) if p not in Y}
            hits = [f for f, block in enumerate(hp.row_labels)
                    if inside <= set(block) and not outside & set(block)]
            if len(hits) < i:
                raise WitnessNotFound(f"only {len(hits)} blocks contain {sorted(inside)} and avoid {sorted(outside)}")
            zeta.append(hits[i - 1])
        return tuple(zeta)
    raise InvalidParameters(f"unknown HpPDA kind {hp.kind!r}")


def witness(hp: HpPda, tau: Sequence[int]) -> tuple[int, ...]:
    """Rows zeta (1-based, aligned with B's rows) with P[zeta, tau] star-equal to B."""
    tau = _check_tau(hp, tau)
    zeta = _select_rows(hp, tau)
    sub = hp.P[np.ix_(list(zeta), [u - 1 for u in tau])]
    if not np.array_equal(sub, hp.B.star_mask()):
        raise WitnessNotFound(f"P[zeta, tau] does not match B's star pattern for tau={tau}")
    return tuple(f + 1 for f in zeta)


def fill(hp: HpPda, tau: Sequence[int]) -> FilledSubarray:
    tau = _check_tau(hp, tau)
    zeta = witness(hp, tau)
    cells = []
    for row in hp.B.cells:
        out = []
        for c in row:
            if c == STAR:
                out.append(STAR)
            elif hp.kind == "man":
                out.append(tuple(tau[p - 1] for p in hp.B.int_labels[c - 1]))
            elif hp.kind == "tdesign":
                out.append(hp.B.int_labels[c - 1])
            else:
                out.append(c)
        cells.append(tuple(out))
    return FilledSubarray(tau, zeta, tuple(cells))


def verify_hppda(hp: HpPda) -> tuple[int, ...] | None:
    """Check the witness for every K'-subset of [K]; return the first failing tau."""
    for tau in combinations(range(1, hp.K + 1), hp.Kp):
        try:
            witness(hp, tau)
        except WitnessNotFound:
            return tau
    return None


def format_hppda(hp: HpPda) -> str:
    K, Kp, F, Fp, Z, Zp, S = hp.params
    head = f"# hppda {hp.kind} K={K} Kp={Kp} F={F} Fp={Fp} Z={Z} Zp={Zp} S={S} t={hp.t}"
    if hp.kind == "tdesign":
        head += f" lambda={hp.design.lam} k={hp.design.k} a={','.join(map(str, hp.a))}"
    return f"{head}\nP\n{format_array(hp.p_cells())}B\n{format_array(hp.B.cells)}"


def parse_hppda(text: str) -> HpPda:
    """Read the format written by :func:`format_hppda`.

    The header supplies the kind and t (and a, lambda for t-designs); P and B
    are taken from the file, so a corrupted array shows up in verification.
    """
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# hppda "):
        raise HppdaParseError("missing '# hppda <kind> ...' header")
    head = lines[0].split()
    kind = head[2] if len(head) > 2 else ""
    try:
        meta = dict(tok.split("=", 1) for tok in head[3:])
        t = int(meta["t"])
        p_at = lines.index("P")
        b_at = lines.index("B")
        p_rows = parse_array("\n".join(lines[p_at + 1:b_at]))
        b_rows = parse_array("\n".join(lines[b_at + 1:]))
        if kind == "tdesign":
            a = tuple(int(x) for x in meta["a"].split(","))
            k, lam = int(meta["k"]), int(meta["lambda"])
    except (ValueError, KeyError) as exc:
        raise HppdaParseError(f"malformed hppda file: {exc}") from None
    if len({len(r) for r in p_rows}) != 1 or len({len(r) for r in b_rows}) != 1:
        raise HppdaParseError("ragged P or B rows")
    P = np.array([[c == STAR for c in r] for r in p_rows], dtype=bool)
    if kind in ("man", "baseline"):
        K, Kp = P.shape[1], len(b_rows[0])
        B = Pda(tuple(map(tuple, b_rows)), row_labels=tuple(subsets(range(1, Kp + 1), t)),
                int_labels=tuple(subsets(range(1, Kp + 1), t + 1)))
        return HpPda(kind, P, B, t, tuple(subsets(range(1, K + 1), t)), B.row_labels)
    if kind == "tdesign":
        blocks = [tuple(int(u) + 1 for u in np.flatnonzero(row)) for row in P]
        # not verified here: a damaged P must surface as a failing tau
        design = TDesign(P.shape[1], k, t, lam, tuple(blocks))
        expected = _tdesign_b(t, a)
        B = Pda(tuple(map(tuple, b_rows)), row_labels=expected.row_labels, int_labels=expected.int_labels)
        return HpPda(kind, P, B, t, design.blocks, B.row_labels, design=design, a=a)
    raise HppdaParseError(f"unknown HpPDA kind {kind!r}")
