"""End-to-end execution of the secretive hotplug schemes.

``place`` builds the library, the shares, the coded shares, the key schedule
and every user's cache; ``deliver`` turns a filled subarray into keyed XOR
transmissions; ``decode`` replays what an active user can do with its cache.

Secrecy is checked exactly.  Every quantity a user sees is a linear function
of independent uniform symbols (file parts, sharing keys, schedule keys), so
for a view with coefficient matrix G the information about a set of file
parts, in field symbols, is ``rank(G) - rank(G without those columns)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace
from fractions import Fraction
from math import comb
from typing import Mapping, Sequence

import numpy as np

from .crypto_coding import (
    CodedShare,
    FileVector,
    SharingSpec,
    make_sharing_spec,
    mds_extend,
    reconstruct_file,
    share_file,
)
from .gf import GF256, Field, FieldMatrix, pivot_columns, rank
from .hppda import HpPda, baseline_hppda, fill
from .pda import STAR, subsets

__all__ = [
    "KeySchedule",
    "CacheContents",
    "Placement",
    "Transmission",
    "ObservationMatrix",
    "SimulationReport",
    "BadDemand",
    "BadActiveSet",
    "DecodeFailed",
    "place",
    "deliver",
    "decode",
    "observation_matrix",
    "leakage",
    "joint_leakage",
    "decodable",
    "simulate",
    "simulate_baseline",
    "secrecy_checks",
    "strip_key",
    "format_label",
    "format_key",
    "trace_lines",
]

KeyLabel = tuple  # (users tuple, copy index)


class BadDemand(ValueError):
    pass


class BadActiveSet(ValueError):
    pass


class DecodeFailed(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class KeySchedule:
    labels: tuple[KeyLabel, ...]
    payloads: np.ndarray  # (len(labels), part_len)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: KeyLabel) -> int:
        return self._index[label]

    def payload(self, label: KeyLabel) -> np.ndarray:
        return self.payloads[self._index[label]]

    def held_by(self, user: int) -> list[KeyLabel]:
        return [lab for lab in self.labels if user in lab[0]]


@dataclass(frozen=True, eq=False)
class CacheContents:
    user: int
    rows: tuple[int, ...]  # 1-based coded-share rows f with P[f, k] = *
    coded: Mapping[tuple[int, int], np.ndarray]  # (file, row) -> payload
    keys: Mapping[KeyLabel, np.ndarray]

    def size(self, unit: int) -> Fraction:
        """Cache size in files; each stored symbol block is 1/unit of a file."""
        return Fraction(len(self.coded) + len(self.keys), unit)


@dataclass(frozen=True, eq=False)
class Placement:
    hppda: HpPda
    N: int
    spec: SharingSpec
    library: tuple[FileVector, ...]
    sharing_keys: np.ndarray  # (N, m, part_len)
    coded: np.ndarray  # (N, F, part_len)
    schedule: KeySchedule
    caches: tuple[CacheContents, ...]
    keyed: bool  # False in the single-transmission (t = K' - 1) MAN mode

    @property
    def unit(self) -> int:
        """Parts per file, i.e. F' - Z'."""
        return self.spec.parts

    def cache(self, user: int) -> CacheContents:
        return self.caches[user - 1]

    @property
    def M(self) -> Fraction:
        return max(c.size(self.unit) for c in self.caches)


@dataclass(frozen=True, eq=False)
class Transmission:
    label: object
    key: KeyLabel | None
    terms: tuple[tuple[int, int, int], ...]  # (file, row f, user k)
    payload: np.ndarray


@dataclass(frozen=True, eq=False)
class ObservationMatrix:
    """Coefficients of one user's view.

    Column layout: all file parts (file-major), then the sharing keys of
    every file, then the schedule keys in schedule order.
    """

    G: FieldMatrix
    provenance: tuple[str, ...]
    N: int
    parts: int
    m: int
    n_schedule: int

    def part_columns(self, file: int) -> list[int]:
        start = (file - 1) * self.parts
        return list(range(start, start + self.parts))


@dataclass(frozen=True, eq=False)
class SimulationReport:
    M: Fraction
    R: Fraction
    active: tuple[int, ...]
    demands: dict[int, int]
    decode_ok: dict[int, bool]
    leakage: dict[tuple[int, int], int]  # (active user, non-demanded file)
    cache_leakage: dict[tuple[int, int], int]  # (any user, file)
    decodable: dict[int, bool]
    joint_leakage: dict[int, int] = dc_field(default_factory=dict)  # active user -> all non-demanded files
    cache_joint_leakage: dict[int, int] = dc_field(default_factory=dict)  # any user -> all files
    transmissions: tuple[Transmission, ...] = ()
    placement: Placement | None = dc_field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return (all(self.decode_ok.values()) and all(self.decodable.values())
                and not any(self.leakage.values()) and not any(self.joint_leakage.values())
                and not any(self.cache_leakage.values()) and not any(self.cache_joint_leakage.values()))


# -- placement ---------------------------------------------------------------

def _schedule_labels(hp: HpPda, keyed: bool) -> list[KeyLabel]:
    users = range(1, hp.K + 1)
    if not keyed:
        return []
    if hp.kind in ("man", "baseline"):
        return [(S, 1) for S in subsets(users, hp.t + 1)]
    labels = []
    for s in range(1, hp.t - 1):
        for i in range(1, hp.a[s - 1] + 1):
            labels += [(S, i) for S in subsets(users, s + 1)]
    return labels


def _is_keyed_mode(hp: HpPda) -> bool:
    return not (hp.kind == "man" and hp.t == hp.Kp - 1)


def place(hp: HpPda, N: int, field: Field = GF256, part_len: int = 1,
          rng: np.random.Generator | int | None = 0) -> Placement:
    """Cache placement for all K users; randomness drawn as files, sharing keys, schedule keys."""
    if N < 1:
        raise ValueError("need at least one file")
    rng = np.random.default_rng(rng)
    m = hp.Z
    parts = hp.Fp - hp.Zp
    spec = make_sharing_spec(m, parts + m, hp.F, field, part_len)
    q = field.order
    files = rng.integers(0, q, size=(N, parts, part_len))
    skeys = rng.integers(0, q, size=(N, m, part_len))
    keyed = _is_keyed_mode(hp)
    labels = _schedule_labels(hp, keyed)
    schedule = KeySchedule(tuple(labels), rng.integers(0, q, size=(len(labels), part_len)))

    library = tuple(FileVector(i + 1, files[i]) for i in range(N))
    coded = np.zeros((N, hp.F, part_len), dtype=np.int64)
    for i in range(N):
        shares = share_file(spec, library[i], skeys[i])
        coded[i] = np.array([c.payload for c in mds_extend(spec, shares, i + 1)])

    caches = []
    for k in range(1, hp.K + 1):
        rows = tuple(int(f) + 1 for f in np.flatnonzero(hp.P[:, k - 1]))
        store = {(i, f): coded[i - 1, f - 1] for i in range(1, N + 1) for f in rows}
        keys = {lab: schedule.payload(lab) for lab in schedule.held_by(k)}
        caches.append(CacheContents(k, rows, store, keys))
    return Placement(hp, N, spec, library, skeys, coded, schedule, tuple(caches), keyed)


# -- delivery ----------------------------------------------------------------

def _normalize_demands(pl: Placement, active: Sequence[int], demands) -> tuple[tuple[int, ...], dict[int, int]]:
    hp = pl.hppda
    active_t = tuple(sorted(int(u) for u in active))
    if len(active_t) != hp.Kp or len(set(active_t)) != hp.Kp or any(not 1 <= u <= hp.K for u in active_t):
        raise BadActiveSet(f"need {hp.Kp} distinct users from [1, {hp.K}], got {tuple(active)}")
    if isinstance(demands, Mapping):
        dem = {int(k): int(v) for k, v in demands.items()}
        if set(dem) != set(active_t):
            raise BadDemand(f"demands given for {sorted(dem)}, active users are {active_t}")
    else:
        demands = list(demands)
        if len(demands) != len(active_t):
            raise BadDemand(f"{len(demands)} demands for {len(active_t)} active users")
        dem = dict(zip(active_t, (int(d) for d in demands)))
    for k, d in dem.items():
        if not 1 <= d <= pl.N:
            raise BadDemand(f"user {k} demands file {d}, library has files 1..{pl.N}")
    return active_t, dem


def _key_for(pl: Placement, label, users: tuple[int, ...], tau: tuple[int, ...]) -> KeyLabel | None:
    if not pl.keyed:
        return None
    hp = pl.hppda
    if hp.kind == "man":
        return (tuple(label), 1)
    if hp.kind == "baseline":
        return (users, 1)
    Y, i = label
    if len(Y) > hp.t - 1:
        return None
    return (tuple(tau[p - 1] for p in Y), i)


def deliver(pl: Placement, active: Sequence[int], demands) -> list[Transmission]:
    """One transmission per distinct label of the filled subarray, in first-appearance order."""
    tau, dem = _normalize_demands(pl, active, demands)
    filled = fill(pl.hppda, tau)
    out = []
    for label in filled.labels():
        cells = filled.cells_with(label)
        terms = tuple((dem[k], f, k) for f, k in cells)
        payload = np.zeros(pl.spec.part_len, dtype=np.int64)
        for i, f, _ in terms:
            payload ^= pl.coded[i - 1, f - 1]
        users = tuple(sorted(k for _, k in cells))
        key = _key_for(pl, label, users, tau)
        if key is not None:
            payload ^= pl.schedule.payload(key)
        out.append(Transmission(label, key, terms, payload))
    return out


def strip_key(pl: Placement, tx: Transmission) -> Transmission:
    """The same transmission sent without its key pad (a deliberately broken scheme)."""
    if tx.key is None:
        return tx
    return replace(tx, key=None, payload=tx.payload ^ pl.schedule.payload(tx.key))


def decode(pl: Placement, transmissions: Sequence[Transmission], user: int, demand: int) -> FileVector:
    cache = pl.cache(user)
    got = {f: cache.coded[(demand, f)] for f in cache.rows}
    for tx in transmissions:
        mine = [(i, f) for i, f, k in tx.terms if k == user]
        if not mine:
            continue
        if len(mine) > 1:
            raise DecodeFailed(f"user {user} appears twice in {format_label(tx.label)}")
        value = tx.payload.copy()
        if tx.key is not None:
            if tx.key not in cache.keys:
                raise DecodeFailed(f"user {user} lacks key {format_key(tx.key)}")
            value ^= cache.keys[tx.key]
        for i, f, k in tx.terms:
            if k == user:
                continue
            if (i, f) not in cache.coded:
                raise DecodeFailed(f"user {user} cannot cancel C[{i},{f}] in {format_label(tx.label)}")
            value ^= cache.coded[(i, f)]
        i, f = mine[0]
        got[f] = value
    if len(got) < pl.spec.n:
        raise DecodeFailed(f"user {user} holds {len(got)} coded shares of file {demand}, needs {pl.spec.n}")
    shares = [CodedShare(demand, f, v) for f, v in sorted(got.items())]
    file, _ = reconstruct_file(pl.spec, shares, demand)
    return file


# -- exact secrecy oracle ----------------------------------------------------

def _coded_row(pl: Placement, coef: np.ndarray, width: int, file: int, row: int) -> np.ndarray:
    parts, m = pl.spec.parts, pl.spec.m
    out = np.zeros(width, dtype=np.int64)
    c = coef[row - 1]
    out[(file - 1) * parts:file * parts] = c[:parts]
    base = pl.N * parts + (file - 1) * m
    out[base:base + m] = c[parts:]
    return out


def observation_matrix(pl: Placement, transmissions: Sequence[Transmission], user: int) -> ObservationMatrix:
    """Coefficient rows of everything ``user`` sees: its cache plus every broadcast transmission."""
    parts, m, N = pl.spec.parts, pl.spec.m, pl.N
    nv = len(pl.schedule)
    width = N * parts + N * m + nv
    coef = pl.spec.coded_coefficients()
    cache = pl.cache(user)
    rows, prov = [], []
    for i, f in cache.coded:
        rows.append(_coded_row(pl, coef, width, i, f))
        prov.append(f"cache C[{i},{f}]")
    for lab in cache.keys:
        r = np.zeros(width, dtype=np.int64)
        r[N * (parts + m) + pl.schedule.index(lab)] = 1
        rows.append(r)
        prov.append(f"cache {format_key(lab)}")
    for tx in transmissions:
        r = np.zeros(width, dtype=np.int64)
        for i, f, _ in tx.terms:
            r ^= _coded_row(pl, coef, width, i, f)
        if tx.key is not None:
            r[N * (parts + m) + pl.schedule.index(tx.key)] ^= 1
        rows.append(r)
        prov.append(f"X{format_label(tx.label)}")
    data = np.array(rows, dtype=np.int64).reshape(len(rows), width)
    return ObservationMatrix(FieldMatrix(pl.spec.field, data), tuple(prov), N, parts, m, nv)


def joint_leakage(obs: ObservationMatrix, files: Sequence[int]) -> int:
    """Symbols of information the view carries about the parts of ``files`` jointly."""
    target = [c for j in files for c in obs.part_columns(j)]
    if obs.G.rows == 0 or not target:
        return 0
    rest = [c for c in range(obs.G.cols) if c not in set(target)]
    pivots = pivot_columns(obs.G, rest + target)
    return sum(p >= len(rest) for p in pivots)


def leakage(obs: ObservationMatrix, file: int) -> int:
    """rank(G) - rank(G with the file's part columns zeroed)."""
    return joint_leakage(obs, [file])


def decodable(obs: ObservationMatrix, file: int) -> bool:
    """Every part unit vector of ``file`` lies in the row space of the view."""
    units = np.zeros((obs.parts, obs.G.cols), dtype=np.int64)
    for r, c in enumerate(obs.part_columns(file)):
        units[r, c] = 1
    stacked = FieldMatrix(obs.G.field, np.vstack([obs.G.data, units]))
    return rank(stacked) == rank(obs.G)


def secrecy_checks(pl: Placement, transmissions: Sequence[Transmission], demands: Mapping[int, int],
                   cache_only: bool = True) -> tuple[bool, bool, bool]:
    """(cache-only secrecy for all users, decodability, no leakage about other files).

    Leakage is tested jointly over all non-demanded files, which bounds every
    per-file value from above.
    """
    files = range(1, pl.N + 1)
    eq1 = True
    if cache_only:
        eq1 = all(joint_leakage(observation_matrix(pl, (), k), files) == 0 for k in range(1, pl.hppda.K + 1))
    eq2 = eq3 = True
    for k, d in demands.items():
        obs = observation_matrix(pl, transmissions, k)
        eq2 &= decodable(obs, d)
        eq3 &= joint_leakage(obs, [j for j in files if j != d]) == 0
    return eq1, eq2, eq3


# -- simulation --------------------------------------------------------------

def simulate(hp: HpPda, N: int, active: Sequence[int], demands, field: Field = GF256,
             part_len: int = 1, seed: int = 0) -> SimulationReport:
    pl = place(hp, N, field, part_len, seed)
    tau, dem = _normalize_demands(pl, active, demands)
    txs = deliver(pl, tau, dem)
    decode_ok, dec, leak, joint = {}, {}, {}, {}
    for k in tau:
        try:
            decode_ok[k] = decode(pl, txs, k, dem[k]) == pl.library[dem[k] - 1]
        except DecodeFailed:
            decode_ok[k] = False
        obs = observation_matrix(pl, txs, k)
        dec[k] = decodable(obs, dem[k])
        for j in range(1, N + 1):
            if j != dem[k]:
                leak[(k, j)] = leakage(obs, j)
        joint[k] = joint_leakage(obs, [j for j in range(1, N + 1) if j != dem[k]])
    cache_leak, cache_joint = {}, {}
    for k in range(1, hp.K + 1):
        obs = observation_matrix(pl, (), k)
        for j in range(1, N + 1):
            cache_leak[(k, j)] = leakage(obs, j)
        cache_joint[k] = joint_leakage(obs, range(1, N + 1))
    R = Fraction(len(txs), pl.unit)
    return SimulationReport(pl.M, R, tau, dem, decode_ok, leak, cache_leak, dec, joint, cache_joint,
                            tuple(txs), pl)


def simulate_baseline(K: int, t: int, N: int, demands, field: Field = GF256,
                      part_len: int = 1, seed: int = 0) -> SimulationReport:
    return simulate(baseline_hppda(K, t), N, range(1, K + 1), demands, field, part_len, seed)


def measure(hp: HpPda, N: int, active: Sequence[int] | None = None) -> tuple[Fraction, Fraction]:
    """(M, R) counted on a placement and one delivery, without the secrecy oracle."""
    pl = place(hp, N)
    active = tuple(range(1, hp.Kp + 1)) if active is None else active
    txs = deliver(pl, active, [1] * hp.Kp)
    return pl.M, Fraction(len(txs), pl.unit)


# -- labels and traces -------------------------------------------------------

def _digits(users: Sequence[int]) -> str:
    return "".join(map(str, users)) if all(u < 10 for u in users) else ".".join(map(str, users))


def format_label(label) -> str:
    if isinstance(label, tuple) and len(label) == 2 and isinstance(label[0], tuple):
        return f"({_digits(label[0])},{label[1]})"
    if isinstance(label, tuple):
        return "{" + ",".join(map(str, label)) + "}"
    return str(label)


def format_key(label: KeyLabel) -> str:
    users, i = label
    return f"V({_digits(users)},{i})"


def _hex(payload: np.ndarray, field: Field) -> str:
    width = (field.bits + 3) // 4
    return "".join(f"{int(x):0{width}x}" for x in payload)


def trace_lines(pl: Placement, transmissions: Sequence[Transmission], full: bool = False) -> list[str]:
    """One line per cache entry and per transmission; payloads only when ``full``."""
    field = pl.spec.field
    lines = []
    for cache in pl.caches:
        for (i, f), payload in cache.coded.items():
            lines.append(f"cache {cache.user} C[{i},{f}]" + (f" {_hex(payload, field)}" if full else ""))
        for lab, payload in cache.keys.items():
            lines.append(f"cache {cache.user} {format_key(lab)}" + (f" {_hex(payload, field)}" if full else ""))
    for tx in transmissions:
        parts = ([format_key(tx.key)] if tx.key else []) + [f"C[d{k}={i},{f}]" for i, f, k in tx.terms]
        line = f"tx X{format_label(tx.label)} = {' + '.join(parts)}"
        lines.append(line + (f" {_hex(tx.payload, field)}" if full else ""))
    return lines
