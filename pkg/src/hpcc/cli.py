"""Command-line front end: ``hpcc verify|construct|simulate|curves``.

Exit codes: 0 success, 1 a semantic failure (invalid array, failed decoding,
nonzero leakage, bad parameters), 2 an I/O or parse failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from itertools import permutations
from pathlib import Path
from typing import Sequence

from . import analysis
from .crypto_coding import FieldTooSmall
from .design import CATALOG, DesignInvalid, ParseError, UnknownDesign, catalog, load_design, parse_design
from .engine import BadActiveSet, BadDemand, simulate, trace_lines
from .gf import Field, default_polynomial
from .hppda import (
    HppdaParseError,
    InvalidParameters,
    MultiplicityOutOfRange,
    baseline_hppda,
    format_hppda,
    man_hppda,
    parse_hppda,
    tdesign_hppda,
    verify_hppda,
)
from .pda import ArrayParseError, InvalidT, Violation, parse_array, verify_pda

EXIT_OK, EXIT_FAIL, EXIT_IO = 0, 1, 2

# errors that mean "valid input, invalid request"
PARAM_ERRORS = (InvalidParameters, MultiplicityOutOfRange, InvalidT, UnknownDesign, FieldTooSmall,
                BadActiveSet, BadDemand, analysis.OutOfRange, analysis.DisjointDomains)


class UsageError(Exception):
    """Raised for input files that cannot be read or parsed."""


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _default_seed() -> int:
    return int(os.environ.get("HPCC_SEED", "0"))


def _design(ref: str):
    if ref in CATALOG:
        return catalog(ref)
    path = Path(ref)
    if not path.exists():
        raise UnknownDesign(f"{ref!r} is neither a catalog design ({', '.join(CATALOG)}) nor a file")
    try:
        return load_design(path)
    except (OSError, ParseError) as exc:
        raise UsageError(str(exc)) from exc


def _build(args) -> object:
    if args.kind == "man-hppda":
        return man_hppda(args.K, args.Kp, args.t)
    if args.kind == "tdesign-hppda":
        if args.design is None or args.a is None:
            raise InvalidParameters("tdesign-hppda needs --design and --a")
        return tdesign_hppda(_design(args.design), args.a)
    return baseline_hppda(args.K, args.t)


def _add_hppda_flags(p: argparse.ArgumentParser, with_baseline: bool) -> None:
    kinds = ["man-hppda", "tdesign-hppda"] + (["baseline"] if with_baseline else [])
    p.add_argument("kind", choices=kinds)
    p.add_argument("--K", type=int, help="total users")
    p.add_argument("--Kp", type=int, help="active users (man-hppda)")
    p.add_argument("--t", type=int, help="MAN parameter")
    p.add_argument("--design", help="catalog name or design file")
    p.add_argument("--a", type=_ints, help="multiplicities a_1,...,a_{t-1}")


def _require(args, *names) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise InvalidParameters(f"{args.kind} needs {' '.join(missing)}")


# -- verify ------------------------------------------------------------------

def cmd_verify(args, out) -> int:
    try:
        text = Path(args.path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    if args.kind == "pda":
        try:
            result = verify_pda(parse_array(text))
        except ArrayParseError as exc:
            raise UsageError(str(exc)) from exc
        if isinstance(result, Violation):
            cells = " ".join(f"({r + 1},{c + 1})" for r, c in result.cells)
            print(f"{result}" + (f" at {cells}" if cells else ""), file=out)
            return EXIT_FAIL
        print(result, file=out)
        return EXIT_OK
    if args.kind == "design":
        try:
            d = parse_design(text, Path(args.path).stem)
        except DesignInvalid as exc:
            print(f"invalid: {exc}", file=out)
            return EXIT_FAIL
        except ParseError as exc:
            raise UsageError(str(exc)) from exc
        print(f"{d.t}-({d.v},{d.k},{d.lam}) design with {d.b} blocks", file=out)
        return EXIT_OK
    try:
        hp = parse_hppda(text)
    except HppdaParseError as exc:
        raise UsageError(str(exc)) from exc
    except ValueError as exc:
        print(f"invalid: {exc}", file=out)
        return EXIT_FAIL
    bad = verify_hppda(hp)
    if bad is not None:
        print(f"invalid: no witness for active set {','.join(map(str, bad))}", file=out)
        return EXIT_FAIL
    print(f"{hp} valid for every {hp.Kp}-subset of {hp.K} users", file=out)
    return EXIT_OK


# -- construct ---------------------------------------------------------------

def cmd_construct(args, out) -> int:
    if args.kind == "man-hppda":
        _require(args, "K", "Kp", "t")
    hp = _build(args)
    out.write(format_hppda(hp))
    return EXIT_OK


# -- simulate ----------------------------------------------------------------

def cmd_simulate(args, out) -> int:
    if args.kind == "man-hppda":
        _require(args, "K", "Kp", "t")
    elif args.kind == "baseline":
        _require(args, "K", "t")
    hp = _build(args)
    if args.active is None:
        active = list(range(1, hp.Kp + 1))
    else:
        active = args.active
    demands = args.demands if args.demands is not None else [(i % args.N) + 1 for i in range(len(active))]
    field = Field(args.field_bits, default_polynomial(args.field_bits))
    rep = simulate(hp, args.N, active, demands, field, args.part_len, args.seed)

    print(f"{hp} N={args.N} seed={args.seed} field=GF(2^{args.field_bits}) part_len={args.part_len}", file=out)
    if args.trace:
        for line in trace_lines(rep.placement, rep.transmissions, full=args.trace == "full"):
            print(line, file=out)
    print("user demand decoded decodable leakage_max leakage_joint", file=out)
    for k in rep.active:
        worst = max((v for (u, _), v in rep.leakage.items() if u == k), default=0)
        print(f"{k} {rep.demands[k]} {'yes' if rep.decode_ok[k] else 'no'} "
              f"{'yes' if rep.decodable[k] else 'no'} {worst} {rep.joint_leakage[k]}", file=out)
    cache_leak = sum(rep.cache_leakage.values()) + sum(rep.cache_joint_leakage.values())
    total_leak = sum(rep.leakage.values()) + sum(rep.joint_leakage.values()) + cache_leak
    ndec = sum(rep.decode_ok.values())
    print(f"cache-only leakage (all {hp.K} users): {cache_leak}", file=out)
    print(f"M={rep.M} R={rep.R} decode={ndec}/{len(rep.active)} leakage={total_leak}", file=out)
    return EXIT_OK if rep.ok else EXIT_FAIL


# -- curves ------------------------------------------------------------------

_SCHEME_HEADS = ("man", "baseline", "bound", "tdesign:")


def _split_schemes(text: str) -> list[str]:
    """Comma-separated scheme list; commas inside a tdesign a-list are kept."""
    out: list[str] = []
    for tok in text.split(","):
        if out and not tok.startswith(_SCHEME_HEADS):
            out[-1] += "," + tok
        else:
            out.append(tok)
    return out


def _tdesign_curve(spec: str, system, anchor: bool):
    _, _, rest = spec.partition(":")
    ref, _, alist = rest.partition(":")
    design = _design(ref)
    K, Kp, N = system
    if (design.v, design.t) != (K, Kp):
        raise InvalidParameters(f"design {design} serves K={design.v}, K'={design.t}, not K={K}, K'={Kp}")
    vectors = None
    if alist:
        vectors = [_ints(chunk) for chunk in alist.split(";")]
    return analysis.envelope(analysis.thm2_points(design, N, vectors, unicast_anchor=anchor),
                             f"tdesign:{design}")


def cmd_curves(args, out) -> int:
    if len(args.system) != 3:
        raise InvalidParameters("--system takes K,Kp,N")
    K, Kp, N = args.system
    curves = []
    for spec in _split_schemes(args.schemes):
        if spec == "man":
            curves.append(analysis.envelope(analysis.thm1_points(K, Kp, N), "man"))
        elif spec == "baseline":
            curves.append(analysis.baseline_curve(K, N))
        elif spec == "bound":
            curves.append(analysis.bound_curve(N, Kp))
        elif spec.startswith("tdesign:"):
            curves.append(_tdesign_curve(spec, (K, Kp, N), args.unicast_anchor))
        else:
            raise InvalidParameters(f"unknown scheme {spec!r}")

    achievable = [c for c in curves if c.scheme != "bound"]
    rows = []
    for a, b in permutations(achievable, 2):
        if a.scheme == "baseline" or a.scheme == b.scheme:
            continue
        ivs = analysis.crossover(a, b)
        rows += zip(ivs, analysis.discrepancy((K, Kp, N), ivs))

    outdir = Path(args.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        with open(outdir / "points.csv", "w", encoding="utf-8", newline="") as fh:
            analysis.write_points(fh, [p for c in curves for p in c.points])
        with open(outdir / "envelope.csv", "w", encoding="utf-8", newline="") as fh:
            analysis.write_envelope(fh, curves)
        with open(outdir / "crossover.csv", "w", encoding="utf-8", newline="") as fh:
            analysis.write_crossovers(fh, rows)
    except OSError as exc:
        raise UsageError(f"cannot write to {outdir}: {exc}") from exc
    analysis.write_crossovers(out, rows)
    return EXIT_OK


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hpcc", description="Secretive hotplug coded caching toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check a PDA, design or HpPDA file")
    p.add_argument("kind", choices=["pda", "design", "hppda"])
    p.add_argument("path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("construct", help="print an HpPDA (P then B)")
    _add_hppda_flags(p, with_baseline=False)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("simulate", help="run placement, delivery, decoding and the secrecy oracle")
    _add_hppda_flags(p, with_baseline=True)
    p.add_argument("--N", type=int, required=True, help="library size")
    p.add_argument("--active", type=_ints, help="active users (default 1..K')")
    p.add_argument("--demands", type=_ints, help="demanded files, aligned with sorted active users")
    p.add_argument("--seed", type=int, default=_default_seed(), help="RNG seed (default $HPCC_SEED or 0)")
    p.add_argument("--field-bits", type=int, default=8, help="field GF(2^l) (default 8)")
    p.add_argument("--part-len", type=int, default=1, help="symbols per part (default 1)")
    p.add_argument("--trace", nargs="?", const="labels", choices=["labels", "full"],
                   help="list caches and transmissions; 'full' adds hex payloads")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("curves", help="write rate-memory points, envelopes and crossovers as CSV")
    p.add_argument("--system", type=_ints, required=True, help="K,Kp,N")
    p.add_argument("--schemes", default="man,baseline,bound",
                   help="comma list of man, baseline, bound, tdesign:<design>[:a;a;...]")
    p.add_argument("--unicast-anchor", action="store_true",
                   help="add the keyed-unicast point (1, K') to t-design curves")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_curves)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except PARAM_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
