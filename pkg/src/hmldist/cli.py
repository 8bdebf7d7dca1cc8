"""Command-line interface.

Exit codes: 0 for a positive verdict (distinguishable, satisfiable) or plain
success, 1 for a negative verdict (bisimilar, unsatisfiable), 2 for bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bench import pair_header, pair_rows, run_random_bench, summary_header, summary_rows, to_csv
from .cleaveland import LATEST, OLDEST, CleavelandFormulas, cleaveland_refine
from .distinguish import DEPTH_AND_NEGATION, DEPTH_ONLY, Distinguisher, WitnessRequest, distinguish
from .equivalences import INF, dist, refine_sequence
from .hml import FormulaError, FormulaStore, metrics, parse_formula, reduce_irreducible, render
from .lts import AutParseError, Lts, gen_chain_a, gen_example_m, gen_ladder_b, parse_aut, write_aut
from .oracle import MAX_ENUM_DEPTH, MAX_ENUM_STATES, enumerate_formulas, enumerate_min_formula
from .reduction import DimacsError, build_lts, parse_dimacs, sat_via_traces

JSON_SCHEMA_VERSION = 1
EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2

MODES = {"depth": DEPTH_ONLY, "lexicographic": DEPTH_AND_NEGATION}
ORACLE_MAX_SIZE = 6


class UsageError(Exception):
    pass


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write_out(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_lts(path: str) -> Lts:
    return parse_aut(_read_text(path))


def _state(lts: Lts, name: str) -> int:
    try:
        return lts.state_by_name(name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _fmt_level(x) -> str | int:
    return "inf" if x == INF else x


def _formula_record(store: FormulaStore, node: int, method: str) -> dict:
    m = metrics(store, node)
    rec = {"method": method}
    rec.update(m.to_json())
    if m.size == m.dag_size:
        rec["formula_inline"] = render(store, node, "inline")
    rec["formula_equations"] = render(store, node, "equations")
    return rec


def _text_formula(rec: dict) -> str:
    return rec.get("formula_inline") or rec["formula_equations"]


# --- distinguish -----------------------------------------------------------

def cmd_distinguish(args) -> int:
    lts = _load_lts(args.file)
    s, t = _state(lts, args.s), _state(lts, args.t)
    mode = MODES[args.mode]
    seq = refine_sequence(lts)
    store = FormulaStore()
    level = dist(seq, s, t)
    out: dict = {
        "version": JSON_SCHEMA_VERSION,
        "s": s,
        "t": t,
        "mode": args.mode,
        "dist": _fmt_level(level),
        "verdict": "bisimilar" if level == INF else "distinguishable",
        "results": [],
    }
    if level != INF:
        if args.method in ("ours", "both"):
            engine = Distinguisher(lts, seq=seq, store=store, seed=args.seed)
            res = distinguish(lts, WitnessRequest(s, t, mode, directed=not args.undirected), engine=engine)
            node = res.formula
            holder, other = res.satisfied_by, t if res.satisfied_by == s else s
            if args.irreducible:
                node = reduce_irreducible(store, node, lts, holder, other)
            rec = _formula_record(store, node, "ours")
            rec.update(
                dirdist=_fmt_level(res.dirdist), calls=res.calls, satisfied_by=holder
            )
            out["results"].append(rec)
        if args.method in ("cleaveland", "both"):
            log = cleaveland_refine(lts, args.strategy)
            base = CleavelandFormulas(lts, log, store)
            node = base.formula(s, t, irreducible=not args.raw_baseline)
            rec = _formula_record(store, node, "cleaveland")
            rec.update(satisfied_by=s)
            out["results"].append(rec)
        if args.oracle:
            out["oracle"] = _oracle_report(lts, s, t, level)

    if args.format == "json":
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        print(_distinguish_text(lts, out))
    return EXIT_OK if level != INF else EXIT_NEGATIVE


def _oracle_report(lts: Lts, s: int, t: int, level) -> dict:
    if lts.num_states > MAX_ENUM_STATES:
        raise UsageError(f"--oracle is limited to {MAX_ENUM_STATES} states")
    report: dict = {}
    found = enumerate_min_formula(lts, s, t, ORACLE_MAX_SIZE)
    if found is None:
        report["min_size"] = f">{ORACLE_MAX_SIZE}"
    else:
        report["min_size"] = found.size
        report["min_formula"] = render(found.store, found.node)
    if level - 1 <= MAX_ENUM_DEPTH:
        report["distinguishable_below_dist"] = enumerate_formulas(lts, s, t, level - 1, directed=False)
    return report


def _distinguish_text(lts: Lts, out: dict) -> str:
    s, t = out["s"], out["t"]
    lines = [f"{lts.state_name(s)} vs {lts.state_name(t)}: {out['verdict']} (dist {out['dist']})"]
    if out["results"]:
        if len(out["results"]) > 1:
            lines.append(f"{'method':<12}{'depth':>8}{'size':>12}{'negdepth':>10}")
            for rec in out["results"]:
                lines.append(f"{rec['method']:<12}{rec['depth']:>8}{rec['size']:>12}{rec['negdepth']:>10}")
        for rec in out["results"]:
            holder = lts.state_name(rec["satisfied_by"])
            lines.append(f"[{rec['method']}] holds in {holder}:")
            lines.append(_text_formula(rec))
            extra = ""
            if "dirdist" in rec:
                extra = f" dirdist={rec['dirdist']} calls={rec['calls']}"
            lines.append(
                f"depth={rec['depth']} negdepth={rec['negdepth']} size={rec['size']} "
                f"dag_size={rec['dag_size']}{extra}"
            )
    if "oracle" in out:
        rep = out["oracle"]
        lines.append(f"oracle: minimal size {rep['min_size']}")
        if "distinguishable_below_dist" in rep:
            lines.append(f"oracle: distinguishable below dist: {rep['distinguishable_below_dist']}")
    return "\n".join(lines)


# --- refine ------------------------------------------------------------------

def cmd_refine(args) -> int:
    lts = _load_lts(args.file)
    seq = refine_sequence(lts)
    if args.format == "json":
        data = {"version": JSON_SCHEMA_VERSION, "K": seq.K, "classes": len(seq.blocks(seq.K))}
        if args.dump_levels:
            data["levels"] = seq.to_json()["levels"]
        print(json.dumps(data, indent=2, sort_keys=True))
        return EXIT_OK
    print(f"K = {seq.K}, {len(seq.blocks(seq.K))} bisimulation classes")
    for i in range(seq.K + 1):
        blocks = seq.blocks(i)
        if args.dump_levels:
            shown = " ".join("{" + ",".join(lts.state_name(s) for s in b) + "}" for b in blocks)
            print(f"level {i}: {shown}")
        else:
            print(f"level {i}: {len(blocks)} blocks")
    return EXIT_OK


# --- gen -----------------------------------------------------------------------

def cmd_gen(args) -> int:
    family = args.family
    if family in ("a", "b"):
        if args.param is None:
            raise UsageError(f"family {family} needs a size parameter")
        try:
            n = int(args.param)
        except ValueError:
            raise UsageError("size parameter must be an integer") from None
        if n < 0:
            raise UsageError("size parameter must be non-negative")
        lts = gen_chain_a(n) if family == "a" else gen_ladder_b(n)
    elif family == "m":
        lts = gen_example_m()
    else:
        if args.param is None:
            raise UsageError("family reduction needs a DIMACS file")
        red = build_lts(parse_dimacs(_read_text(args.param)))
        lts = red.lts
        if args.roles:
            Path(args.roles).write_text(red.role_map_json() + "\n")
    _write_out(write_aut(lts), args.output)
    return EXIT_OK


# --- reduce ------------------------------------------------------------------

def cmd_reduce(args) -> int:
    cnf = parse_dimacs(_read_text(args.file))
    if args.emit_aut:
        red = build_lts(cnf)
        _write_out(write_aut(red.lts), args.output)
        if args.roles:
            Path(args.roles).write_text(red.role_map_json() + "\n")
        return EXIT_OK
    verdict = sat_via_traces(cnf)
    if verdict.satisfiable:
        lits = [str(p if verdict.assignment[p] else -p) for p in sorted(verdict.assignment)]
        print("s SATISFIABLE")
        print("v " + " ".join(lits + ["0"]))
        print("c trace " + " ".join(verdict.trace))
        return EXIT_OK
    print("s UNSATISFIABLE")
    return EXIT_NEGATIVE


# --- metrics -------------------------------------------------------------------

def cmd_metrics(args) -> int:
    store = FormulaStore()
    node = parse_formula(store, _read_text(args.file))
    m = metrics(store, node)
    if args.format == "json":
        data = {"version": JSON_SCHEMA_VERSION}
        data.update(m.to_json())
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(f"size={m.size} dag_size={m.dag_size} depth={m.depth} negdepth={m.negdepth}")
    return EXIT_OK


# --- bench ---------------------------------------------------------------------

def _state_range(text: str) -> tuple[int, int]:
    try:
        if "-" in text:
            lo, hi = (int(x) for x in text.split("-", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or LO-HI, got {text!r}") from None
    if lo < 2 or hi < lo:
        raise argparse.ArgumentTypeError("state range must satisfy 2 <= LO <= HI")
    return lo, hi


def cmd_bench(args) -> int:
    results = run_random_bench(
        args.random,
        args.states,
        density=args.density,
        actions=args.actions,
        pairs=args.pairs,
        seed=args.seed,
        strategy=args.strategy,
        irreducible=not args.no_irreducible,
    )
    _write_out(to_csv(summary_header(args.timing), summary_rows(results, args.timing)), args.output)
    if args.pairs_csv:
        Path(args.pairs_csv).write_text(to_csv(pair_header(), pair_rows(results)))
    return EXIT_OK


# --- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmldist", description="Minimal distinguishing formulas for labelled transition systems."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("distinguish", help="explain why two states are not bisimilar")
    p.add_argument("file", help=".aut file ('-' for stdin)")
    p.add_argument("s")
    p.add_argument("t")
    p.add_argument("--mode", choices=sorted(MODES), default="lexicographic")
    p.add_argument("--method", choices=["ours", "cleaveland", "both"], default="ours")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--seed", type=int, default=None, help="pick among admissible observations at random")
    p.add_argument("--undirected", action="store_true", help="allow the witness to hold in t instead of s")
    p.add_argument("--irreducible", action="store_true", help="also reduce our witness to an irreducible one")
    p.add_argument("--raw-baseline", action="store_true", help="skip the irreducibility pass for the baseline")
    p.add_argument("--strategy", choices=[LATEST, OLDEST], default=LATEST, help="baseline splitter choice")
    p.add_argument("--oracle", action="store_true", help=f"brute-force cross-check (<= {MAX_ENUM_STATES} states)")
    p.set_defaults(func=cmd_distinguish)

    p = sub.add_parser("refine", help="k-bisimulation partitions")
    p.add_argument("file")
    p.add_argument("--dump-levels", action="store_true")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("gen", help="write an example LTS in .aut format")
    p.add_argument("family", choices=["a", "b", "m", "reduction"])
    p.add_argument("param", nargs="?", help="size n for a/b, DIMACS file for reduction")
    p.add_argument("-o", "--output")
    p.add_argument("--roles", help="reduction only: write the state role map as JSON here")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("reduce", help="CNF to LTS reduction")
    p.add_argument("file", help="DIMACS cnf file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--emit-aut", action="store_true")
    group.add_argument("--decide", action="store_true")
    p.add_argument("-o", "--output")
    p.add_argument("--roles")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("metrics", help="size and depths of a formula file")
    p.add_argument("file")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("bench", help="compare against the baseline on random LTSs")
    p.add_argument("--random", type=int, default=200, metavar="N", help="number of random LTSs")
    p.add_argument("--states", type=_state_range, default=(50, 200), metavar="LO-HI")
    p.add_argument("--density", type=float, default=2.0, help="mean out-degree")
    p.add_argument("--actions", type=int, default=2)
    p.add_argument("--pairs", type=int, default=10, help="state pairs per LTS")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategy", choices=[LATEST, OLDEST], default=LATEST)
    p.add_argument("--no-irreducible", action="store_true")
    p.add_argument("--timing", action="store_true", help="add wall-clock columns (not reproducible)")
    p.add_argument("--pairs-csv", help="also write one row per state pair here")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, AutParseError, DimacsError, FormulaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
