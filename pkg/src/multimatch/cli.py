"""Command-line front end.

Reports go to standard output, diagnostics to standard error.  Exit codes:
0 success, 1 usage or input error, 2 infeasible instance (or an infeasible
heuristic outcome).
"""

from __future__ import annotations

import argparse
import json
import random
import re
import statistics
import sys
import time
from pathlib import Path
from typing import Sequence

from . import approx, gadgets, lp
from .core import (
    InfeasibleInstanceError,
    InstanceFormatError,
    TemporalGraph,
    digest,
    parse_instance,
    parse_solution,
    profit,
    serialize_instance,
    verify,
)
from .exact import DEFAULT_CAP, MIM, MUM, EnumerationOverflow, exact_solve
from .matching import reduce
from .report import CertifiedRatio, SolveReport

OK, USAGE, INFEASIBLE = 0, 1, 2


class UsageError(Exception):
    pass


_PAIR = re.compile(r"\[\s*(-?\d+),\s*(-?\d+)\s*\]")


def _emit(doc) -> None:
    sys.stdout.write(_PAIR.sub(r"[\1, \2]", json.dumps(doc, indent=2)) + "\n")


def _read_instance(path: str) -> TemporalGraph:
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return parse_instance(text)


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- solve -----------------------------------------------------------------------

def _solve(g: TemporalGraph, objective: str, method: str, cap: int) -> tuple[SolveReport, int]:
    if method == "exact":
        started = time.perf_counter()
        res = exact_solve(g, objective, cap)
        rep = SolveReport("exact", objective, res.value, CertifiedRatio.exact(), res.solution, 0,
                          (time.perf_counter() - started) * 1000, digest(g), {"pm_counts": list(res.pm_counts)})
        return rep, OK
    if method == "alg1":
        if g.tau != 2:
            raise UsageError(f"method alg1 needs a 2-stage instance, got tau = {g.tau}")
        return approx.alg1_report(g, objective), OK
    if method == "alg2":
        return approx.alg2_report(g, objective), OK
    if method == "reduction":
        return approx.reduction_report(g, objective), OK
    if method == "auto":
        return (approx.best_mim(g) if objective == MIM else approx.mum_via_mim(g)), OK
    if method == "trivial":
        return approx.trivial_mum(g, objective), OK
    if method == "flawed":
        if g.tau != 4:
            raise UsageError(f"method flawed needs a 4-stage instance, got tau = {g.tau}")
        started = time.perf_counter()
        res = approx.flawed_maxmpm_heuristic(g)
        sol = res.solution
        notes = {
            "candidate_a": {"stages": [[list(e) for e in sorted(m)] for m in res.candidate_a], **res.verdict_a.to_json()},
            "candidate_b": {"stages": [[list(e) for e in sorted(m)] for m in res.candidate_b], **res.verdict_b.to_json()},
        }
        value = 0
        if sol is not None:
            value = profit(sol) if objective == MIM else verify(g, sol).union_cost
        rep = SolveReport("flawed", objective, value, None, sol, 0,
                          (time.perf_counter() - started) * 1000, digest(g), notes)
        return rep, OK if sol is not None else INFEASIBLE
    raise UsageError(f"unknown method {method!r}")


def cmd_solve(args) -> int:
    g = _read_instance(args.infile)
    if not args.no_reduce:
        g = reduce(g)
    rep, code = _solve(g, args.objective, args.method, args.cap)
    rep.notes.setdefault("reduced_input", not args.no_reduce)
    _emit(rep.to_json())
    if code == INFEASIBLE:
        print("no feasible solution produced", file=sys.stderr)
    return code


# -- generate ----------------------------------------------------------------------

def _parse_edge_list(text: str) -> list[tuple[int, int]]:
    out = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        u, _, v = part.partition("-")
        try:
            out.append((int(u), int(v)))
        except ValueError:
            raise UsageError(f"bad edge {part!r}; expected 'u-v'") from None
    return out


def cmd_generate(args) -> int:
    labels = None
    kind = args.family
    try:
        if kind == "maxcut":
            edges = _parse_edge_list(args.edges)
            n = args.n if args.n is not None else 1 + max((max(e) for e in edges), default=-1)
            gad = gadgets.gen_maxcut_gadget(n, edges, args.k)
            g, labels = gad.graph, gad.labels
            g.meta["kappa"] = gad.kappa
        elif kind == "lp-gap":
            gad = gadgets.gen_lp_gap(args.k)
            g, labels = gad.graph, gad.labels
        elif kind == "counterexample":
            gad = gadgets.gen_counterexample()
            g, labels = gad.graph, gad.labels
        elif kind == "two-cycles":
            g = gadgets.gen_two_cycles(args.k)
        elif kind == "alternating":
            g = gadgets.gen_alternating(args.tau)
        elif kind == "random":
            g = gadgets.gen_random(args.n, args.tau, args.p, args.seed)
        else:
            raise UsageError(f"unknown family {kind!r}")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(serialize_instance(g), args.out)
    if labels is not None and args.labels_out:
        doc = {"labels": {name: list(e) for name, e in labels.items()}}
        Path(args.labels_out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return OK


# -- small commands ------------------------------------------------------------------

def cmd_verify(args) -> int:
    g = _read_instance(args.infile)
    sol = parse_solution(Path(args.solution).read_text(encoding="utf-8"))
    try:
        verdict = verify(g, sol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(verdict.to_json())
    return OK if verdict else INFEASIBLE


def cmd_reduce(args) -> int:
    g = reduce(_read_instance(args.infile))
    _write(serialize_instance(g), args.out)
    return OK


def cmd_certify_gap(args) -> int:
    try:
        cert = lp.certify_gap(args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(cert.to_json())
    return OK


def cmd_export_lp(args) -> int:
    g = _read_instance(args.infile)
    try:
        model = lp.build_lp(g, args.blossom_cap)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(lp.to_lp_text(model), args.out)
    return OK


# -- bench -----------------------------------------------------------------------------

BENCH_METHODS = ("alg2", "reduction", "auto")


def bench_rows(n: int, tau: int, count: int, seed: int, p: float, cap: int) -> list[dict]:
    """Per-instance values and ratios for a seeded batch of random instances."""
    rng = random.Random(seed)
    rows = []
    for idx in range(count):
        inst_seed = rng.randrange(2**31)
        g = reduce(gadgets.gen_random(n, tau, p, inst_seed))
        row: dict = {"index": idx, "seed": inst_seed, "mu": g.mu}
        try:
            row["opt"] = exact_solve(g, MIM, cap).value
        except EnumerationOverflow:
            row["opt"] = None
        reports = {
            "alg2": approx.alg2_report(g),
            "reduction": approx.reduction_report(g),
            "auto": approx.best_mim(g),
        }
        for name, rep in reports.items():
            row[name] = rep.value
            opt = row["opt"]
            row[f"{name}_ratio"] = None if opt is None else (1.0 if opt == 0 else rep.value / opt)
            row[f"{name}_bound"] = rep.certified_ratio.ratio()
            row[f"{name}_ok"] = None if opt is None else rep.certified_ratio.holds(rep.value, opt)
        rows.append(row)
    return rows


def _bench_table(rows: list[dict]) -> str:
    head = f"{'idx':>4} {'seed':>11} {'mu':>3} {'opt':>4}" + "".join(
        f" {m:>9} {'ratio':>6} {'bound':>6}" for m in BENCH_METHODS)
    lines = [head, "-" * len(head)]
    for r in rows:
        line = f"{r['index']:>4} {r['seed']:>11} {r['mu']:>3} {str(r['opt']):>4}"
        for m in BENCH_METHODS:
            ratio = "-" if r[f"{m}_ratio"] is None else f"{r[f'{m}_ratio']:.3f}"
            line += f" {r[m]:>9} {ratio:>6} {r[f'{m}_bound']:>6.3f}"
        lines.append(line)
    lines.append("-" * len(head))
    for m in BENCH_METHODS:
        ratios = [r[f"{m}_ratio"] for r in rows if r[f"{m}_ratio"] is not None]
        held = sum(1 for r in rows if r[f"{m}_ok"])
        if ratios:
            lines.append(f"{m:>9}: min ratio {min(ratios):.3f}  mean ratio {statistics.fmean(ratios):.3f}  "
                         f"bound held {held}/{len(ratios)}")
    return "\n".join(lines) + "\n"


def cmd_bench(args) -> int:
    try:
        rows = bench_rows(args.n, args.tau, args.count, args.seed, args.p, args.cap)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.json:
        _emit(rows)
    else:
        sys.stdout.write(_bench_table(rows))
    return OK


# -- wiring ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multimatch", description="Multistage perfect matching toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance")
    p.add_argument("--in", dest="infile", required=True, help="instance file ('-' for stdin)")
    p.add_argument("--objective", choices=(MIM, MUM), default=MIM)
    p.add_argument("--method", default="auto",
                   choices=("exact", "alg1", "alg2", "reduction", "auto", "trivial", "flawed"))
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="perfect matchings enumerated per stage")
    p.add_argument("--no-reduce", action="store_true", help="skip forbidden-edge removal")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="emit a generated instance")
    p.add_argument("family", choices=("maxcut", "lp-gap", "counterexample", "two-cycles", "alternating", "random"))
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--tau", type=int, default=None)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--edges", default="", help="Max-Cut input graph as 'u-v,u-v,...'")
    p.add_argument("--out", "-o", default=None)
    p.add_argument("--labels-out", default=None, help="write the label side-document here")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="check a solution against an instance")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce", help="remove forbidden edges")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", "-o", default=None)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("certify-gap", help="certify the LP integrality gap for parameter k")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_certify_gap)

    p = sub.add_parser("export-lp", help="write the two-stage LP in CPLEX LP format")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--blossom-cap", type=int, default=None)
    p.add_argument("--out", "-o", default=None)
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("bench", help="ratio table over seeded random instances")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--tau", type=int, default=3)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float, default=0.4)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


_REQUIRED = {
    "maxcut": (),
    "lp-gap": ("k",),
    "two-cycles": ("k",),
    "alternating": ("tau",),
    "random": ("n", "tau"),
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    if args.command == "generate":
        missing = [f"--{f}" for f in _REQUIRED.get(args.family, ()) if getattr(args, f) is None]
        if missing:
            print(f"error: generate {args.family} needs {', '.join(missing)}", file=sys.stderr)
            return USAGE
        if args.family == "maxcut" and args.k is None:
            args.k = 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except InstanceFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except InfeasibleInstanceError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return INFEASIBLE
    except EnumerationOverflow as exc:
        print(f"error: {exc} (raise --cap)", file=sys.stderr)
        return USAGE
    except approx.NotReducedError as exc:
        print(f"error: input is not reduced: {exc} (drop --no-reduce)", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
