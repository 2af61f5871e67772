"""Rate-memory points, lower envelopes, the converse bound and crossovers.

Everything is exact (``Fraction``); decimals appear only in the CSV writers.
Memory sharing is applied within one scheme at a time: a scheme's curve is
the lower convex envelope of its own achievable points.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from itertools import combinations, product
from math import comb
from typing import Iterable, Sequence, TextIO

from .design import TDesign, lambda_i_t, lambda_s
from .hppda import InvalidParameters, MultiplicityOutOfRange
from .pda import RatePoint, baseline_point

__all__ = [
    "RatePoint",
    "Curve",
    "Interval",
    "OutOfRange",
    "DisjointDomains",
    "REFERENCE_CROSSOVERS",
    "thm1_points",
    "thm2_points",
    "admissible_a",
    "baseline_curve",
    "lower_bound",
    "bound_curve",
    "envelope",
    "crossover",
    "discrepancy",
    "write_points",
    "write_envelope",
    "write_crossovers",
]


class OutOfRange(ValueError):
    pass


class DisjointDomains(ValueError):
    pass


# Published crossover endpoints, keyed by (system, schemeA, schemeB):
# ((M_from, R_from), (M_to, R_to)) as printed, two decimals or fewer.
REFERENCE_CROSSOVERS = {
    ((8, 3, 8), "man", "baseline"): (("1", "3"), ("11.9", "1.45")),
    ((8, 3, 8), "tdesign:sqs-8-4-1", "baseline"): (("10.4", "1.52"), ("15.7", "1.25")),
    ((12, 3, 12), "man", "baseline"): (("1", "3"), ("19.12", "1.47")),
}


# -- achievable points -------------------------------------------------------

def thm1_points(K: int, Kp: int, N: int) -> list[RatePoint]:
    """MAN-HpPDA points for t = 0..K'-2 and the single-transmission point."""
    if not (1 <= Kp <= K) or N < 1:
        raise InvalidParameters(f"need 1 <= K' <= K and N >= 1, got K={K} K'={Kp} N={N}")
    out = []
    for t in range(Kp - 1):
        Z = comb(K - 1, t - 1) if t else 0
        unit = comb(Kp - 1, t)  # F' - Z'
        out.append(RatePoint(Fraction(N * Z + comb(K - 1, t), unit), Fraction(comb(Kp, t + 1), unit),
                             "man", f"t={t}"))
    if Kp >= 2:
        out.append(RatePoint(N * comb(K - 1, Kp - 2), 1, "man", f"t={Kp - 1}"))
    return out


def admissible_a(design: TDesign) -> list[tuple[int, ...]]:
    """Every (a_1..a_{t-1}) with 0 <= a_s <= lambda_s^t, not all zero, in lex order."""
    ranges = [range(lambda_i_t(design, s) + 1) for s in range(1, design.t)]
    return [a for a in product(*ranges) if any(a)]


def _thm2_point(design: TDesign, N: int, a: Sequence[int]) -> RatePoint:
    t = design.t
    if len(a) != t - 1:
        raise InvalidParameters(f"need {t - 1} multiplicities, got {len(a)}")
    for s, a_s in enumerate(a, 1):
        if not 0 <= a_s <= lambda_i_t(design, s):
            raise MultiplicityOutOfRange(f"a_{s}={a_s} outside [0, {lambda_i_t(design, s)}]")
    unit = sum(a_s * comb(t - 1, s) for s, a_s in enumerate(a, 1))  # F' - Z'
    if unit == 0:
        raise MultiplicityOutOfRange(f"a={tuple(a)} gives F' = Z'")
    Z = lambda_s(design, 1)
    keys = sum(a[s - 1] * comb(design.v - 1, s) for s in range(1, t - 1))
    S = sum(a_s * comb(t, s + 1) for s, a_s in enumerate(a, 1))
    return RatePoint(Fraction(N * Z + keys, unit), Fraction(S, unit),
                     f"tdesign:{design}", "a=" + ",".join(map(str, a)))


def thm2_points(design: TDesign, N: int, a_vectors: Iterable[Sequence[int]] | None = None,
                unicast_anchor: bool = False) -> list[RatePoint]:
    """t-design HpPDA points, one per a-vector (all admissible ones by default).

    ``unicast_anchor`` adds the always-achievable keyed-unicast point
    (1, K'), with K' = t.
    """
    vectors = admissible_a(design) if a_vectors is None else [tuple(a) for a in a_vectors]
    out = [_thm2_point(design, N, a) for a in vectors]
    if unicast_anchor:
        out.insert(0, RatePoint(1, design.t, f"tdesign:{design}", "unicast"))
    return out


def baseline_curve(K: int, N: int) -> "Curve":
    return envelope([baseline_point(K, t, N) for t in range(K)], "baseline")


# -- converse ---------------------------------------------------------------

def _bound_terms(N: int, Kp: int) -> list[tuple[Fraction, Fraction]]:
    """(intercept, slope) of each per-l linear bound."""
    terms = []
    for l in range(1, min(N // 2, Kp) + 1):
        f = N // l
        terms.append((Fraction(l * f - 1, f - 1), Fraction(-(l - 1), f - 1)))
    return terms


def lower_bound(N: int, Kp: int, M) -> Fraction:
    """Converse on the secretive rate at memory M, never below 1."""
    M = Fraction(M)
    if not 1 <= M <= N * (Kp - 1):
        raise OutOfRange(f"M={M} outside [1, {N * (Kp - 1)}]")
    return max([Fraction(1)] + [c + s * M for c, s in _bound_terms(N, Kp)])


def bound_curve(N: int, Kp: int) -> "Curve":
    """The bound as an exact piecewise-linear curve over [1, N(K'-1)]."""
    lo, hi = Fraction(1), Fraction(N * (Kp - 1))
    if hi < lo:
        raise OutOfRange(f"no admissible memory for N={N} K'={Kp}")
    lines = _bound_terms(N, Kp) + [(Fraction(1), Fraction(0))]
    xs = {lo, hi}
    for (c1, s1), (c2, s2) in combinations(lines, 2):
        if s1 != s2:
            x = (c2 - c1) / (s1 - s2)
            if lo <= x <= hi:
                xs.add(x)
    pts = [RatePoint(x, lower_bound(N, Kp, x), "bound", "") for x in sorted(xs)]
    env = envelope(pts, "bound")
    # keep the flat tail so the bound is defined over the whole range
    if env.hull[-1].M < hi:
        return Curve("bound", env.points, env.hull + (pts[-1],))
    return env


# -- envelopes ---------------------------------------------------------------

@dataclass(frozen=True)
class Curve:
    """A scheme's points and the vertices of their lower convex envelope."""

    scheme: str
    points: tuple[RatePoint, ...]
    hull: tuple[RatePoint, ...]

    @property
    def domain(self) -> tuple[Fraction, Fraction]:
        return self.hull[0].M, self.hull[-1].M

    def breakpoints(self) -> list[Fraction]:
        return [p.M for p in self.hull]

    def value_at(self, M) -> Fraction:
        M = Fraction(M)
        lo, hi = self.domain
        if not lo <= M <= hi:
            raise OutOfRange(f"M={M} outside [{lo}, {hi}] for {self.scheme}")
        for p, q in zip(self.hull, self.hull[1:]):
            if p.M <= M <= q.M:
                return p.R + (q.R - p.R) * (M - p.M) / (q.M - p.M)
        return self.hull[0].R


def _cross(o: RatePoint, a: RatePoint, b: RatePoint) -> Fraction:
    return (a.M - o.M) * (b.R - o.R) - (a.R - o.R) * (b.M - o.M)


def envelope(points: Iterable[RatePoint], scheme: str | None = None) -> Curve:
    """Lower convex envelope, keeping only the non-increasing part.

    A point is dropped when another has no larger M and no larger R.  Hull
    vertices that are collinear with their neighbours are dropped too.
    """
    pts = list(points)
    if not pts:
        raise ValueError("envelope of no points")
    scheme = pts[0].scheme if scheme is None else scheme
    # one point per M (lowest R), then Pareto front in increasing M
    best: dict[Fraction, RatePoint] = {}
    for p in pts:
        if p.M not in best or p.R < best[p.M].R:
            best[p.M] = p
    front = []
    for M in sorted(best):
        p = best[M]
        if not front or p.R < front[-1].R:
            front.append(p)
    hull: list[RatePoint] = []
    for p in front:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return Curve(scheme, tuple(pts), tuple(hull))


# -- crossovers --------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    """Where curve A is strictly below curve B, with A's rates at the ends."""

    scheme_a: str
    scheme_b: str
    M_from: Fraction
    M_to: Fraction
    R_from: Fraction
    R_to: Fraction


def crossover(a: Curve, b: Curve, M_range: tuple | None = None) -> list[Interval]:
    """Maximal intervals of ``M_range`` (default: common domain) where A < B."""
    lo = max(a.domain[0], b.domain[0])
    hi = min(a.domain[1], b.domain[1])
    if M_range is not None:
        lo, hi = max(lo, Fraction(M_range[0])), min(hi, Fraction(M_range[1]))
    if lo > hi:
        raise DisjointDomains(f"{a.scheme} and {b.scheme} share no memory range")
    xs = sorted({lo, hi} | {x for x in a.breakpoints() + b.breakpoints() if lo < x < hi})
    diff = lambda x: a.value_at(x) - b.value_at(x)
    pieces: list[list[Fraction]] = []
    if len(xs) == 1:
        if diff(lo) < 0:
            pieces.append([lo, lo])
    for x0, x1 in zip(xs, xs[1:]):
        d0, d1 = diff(x0), diff(x1)
        if d0 >= 0 and d1 >= 0:
            continue
        if d0 < 0 and d1 < 0:
            seg = [x0, x1]
        else:
            root = x0 + d0 * (x1 - x0) / (d0 - d1)
            seg = [x0, root] if d0 < 0 else [root, x1]
        if pieces and pieces[-1][1] == seg[0]:
            pieces[-1][1] = seg[1]
        else:
            pieces.append(seg)
    return [Interval(a.scheme, b.scheme, x0, x1, a.value_at(x0), a.value_at(x1)) for x0, x1 in pieces]


def _dec(x: Fraction, places: int) -> Decimal:
    q = Decimal(1).scaleb(-places)
    return (Decimal(x.numerator) / Decimal(x.denominator)).quantize(q, rounding=ROUND_HALF_UP)


def _matches(iv: Interval, ref) -> bool:
    got = (iv.M_from, iv.R_from, iv.M_to, iv.R_to)
    for g, w in zip(got, [v for pair in ref for v in pair]):
        places = -Decimal(w).as_tuple().exponent
        if abs(Fraction(w) - g) > Fraction(1, 2 * 10 ** places):
            return False
    return True


def discrepancy(system: tuple[int, int, int], intervals: Sequence[Interval]) -> list[str]:
    """One note per interval: empty when it matches the reference row.

    A value matches when it is within half a unit of the reference's last
    printed digit.  Only the interval nearest the reference is compared;
    any other interval for the same pair is noted as unlisted.
    """
    notes = [""] * len(intervals)
    if not intervals:
        return notes
    ref = REFERENCE_CROSSOVERS.get((tuple(system), intervals[0].scheme_a, intervals[0].scheme_b))
    if ref is None:
        return notes
    (mf, rf), (mt, rt) = ref
    nearest = min(range(len(intervals)),
                  key=lambda i: abs(intervals[i].M_from - Fraction(mf)) + abs(intervals[i].M_to - Fraction(mt)))
    for i, iv in enumerate(intervals):
        if i != nearest:
            notes[i] = "not in reference"
        elif not _matches(iv, ref):
            notes[i] = f"differs from reference ({mf};{rf})-({mt};{rt})"
    return notes


# -- CSV --------------------------------------------------------------------

def write_points(out: TextIO, points: Iterable[RatePoint]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["scheme", "param", "M", "R"])
    for p in points:
        w.writerow([p.scheme, p.param, _dec(p.M, 6), _dec(p.R, 6)])


def write_envelope(out: TextIO, curves: Iterable[Curve]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["scheme", "M", "R"])
    for c in curves:
        for p in c.hull:
            w.writerow([c.scheme, _dec(p.M, 6), _dec(p.R, 6)])


def write_crossovers(out: TextIO, rows: Iterable[tuple[Interval, str]]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["schemeA", "schemeB", "M_from", "R_from", "M_to", "R_to", "note"])
    for iv, note in rows:
        w.writerow([iv.scheme_a, iv.scheme_b, _dec(iv.M_from, 2), _dec(iv.R_from, 2),
                    _dec(iv.M_to, 2), _dec(iv.R_to, 2), note])
