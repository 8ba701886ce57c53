"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from hyperhybrid import bell, checks, dsl
from hyperhybrid.circuit import YsPhases, run
from hyperhybrid.errors import CircuitSourceError, HyperhybridError, InvariantViolation
from hyperhybrid.measurement import (
    ALL_DOF_PAIRS,
    ChshSettings,
    Dof,
    chsh,
    correlation,
    difference_embedding,
    scan_chsh,
    sum_embedding,
    ys_table,
)
from hyperhybrid.modes import fock_probability, norm, occupation_key

EMBEDDINGS = {"difference": difference_embedding, "sum": sum_embedding}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def sig(x: float) -> float:
    """Round to 12 significant digits; collapses ``-0.0`` to ``0.0``."""
    x = float(f"{float(x):.12g}")
    return 0.0 if x == 0 else x


def _rounded(obj):
    if isinstance(obj, float):
        return sig(obj)
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    return obj


def _dump_json(obj, out):
    json.dump(_rounded(obj), out, indent=2)
    out.write("\n")


def _fmt(x: float) -> str:
    return f"{sig(x):.12g}"


def _format(args, out) -> str:
    if args.format:
        return args.format
    return "pretty" if out.isatty() else "json"


def _settings(text: str) -> list:
    parts = text.split(",")
    if len(parts) != 4:
        raise UsageError("--settings expects four comma-separated angles a0,a1,b0,b1")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"--settings: not a number in {text!r}") from None


# -- subcommands -------------------------------------------------------------

def cmd_run(args, out):
    circuit = dsl.parse_file(args.circuit)
    state = run(circuit)
    if abs(norm(state) - 1) > 1e-10:
        raise InvariantViolation(f"output norm {norm(state)!r} differs from 1")
    fmt = _format(args, out)
    rows = [(occupation_key(state.basis, occ), amp, fock_probability(state, occ)) for occ, amp in state.sorted_terms()]
    if fmt == "json":
        _dump_json({key: [amp.real, amp.imag] for key, amp, _ in rows}, out)
    elif fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["occupation", "re", "im", "probability"])
        for key, amp, prob in rows:
            writer.writerow([key, _fmt(amp.real), _fmt(amp.imag), _fmt(prob)])
    else:
        width = max((len(k) for k, _, _ in rows), default=6)
        for key, amp, prob in rows:
            out.write(f"{key or 'vacuum':<{width}}  {sig(amp.real):+.10f} {sig(amp.imag):+.10f}i   p={sig(prob):.10f}\n")


def _labels(dof: Dof, plus_path: str, minus_path: str):
    return (plus_path, minus_path) if dof == Dof.EXTERNAL else ("up", "down")


def cmd_tables(args, out):
    phases = YsPhases(args.phiR, args.phiL, args.phiU, args.phiD)
    table = ys_table(phases, Dof(args.alice_dof), Dof(args.bob_dof))
    e = correlation(table)
    fmt = _format(args, out)
    if fmt == "json":
        _dump_json({**table.to_json(), "E": e, "phi": phases.total}, out)
    elif fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["pp", "pm", "mp", "mm", "weight", "E"])
        writer.writerow([_fmt(v) for v in (table.pp, table.pm, table.mp, table.mm, table.weight, e)])
    else:
        a_lab = _labels(table.alice_dof, "L", "D")
        b_lab = _labels(table.bob_dof, "U", "R")
        out.write(f"alice={table.alice_dof.value} bob={table.bob_dof.value} phi={phases.total:.6f}\n")
        out.write(f"{'':>8}{'B:' + b_lab[0]:>14}{'B:' + b_lab[1]:>14}\n")
        for i, lab in enumerate(a_lab):
            out.write(f"{'A:' + lab:>8}{table.p[i, 0]:>14.10f}{table.p[i, 1]:>14.10f}\n")
        out.write(f"weight={sig(table.weight):.10f}  E={sig(e):+.10f}\n")


def cmd_chsh(args, out):
    a0, a1, b0, b1 = _settings(args.settings)
    settings = ChshSettings(a0, a1, b0, b1, Dof(args.alice_dof), Dof(args.bob_dof))
    result = chsh(settings, EMBEDDINGS[args.embedding])
    fmt = _format(args, out)
    if fmt == "json":
        _dump_json(result.to_json(), out)
    elif fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["phiA0", "phiA1", "phiB0", "phiB1", "aliceDof", "bobDof", "S"])
        writer.writerow([_fmt(a0), _fmt(a1), _fmt(b0), _fmt(b1), settings.alice_dof.value,
                         settings.bob_dof.value, _fmt(result.s_value)])
    else:
        for key, value in result.correlators.items():
            out.write(f"E({key[:2]},{key[2:]}) = {value:+.10f}\n")
        out.write(f"S = {result.s_value:+.10f}   |S| = {abs(result.s_value):.10f}   "
                  f"(local bound 2, quantum bound {2 * math.sqrt(2):.10f})\n")


def cmd_scan(args, out):
    if args.resolution < 8:
        raise UsageError("--resolution must be at least 8")
    pairs = ALL_DOF_PAIRS
    if args.alice_dof or args.bob_dof:
        pairs = [(Dof(args.alice_dof or "external"), Dof(args.bob_dof or "external"))]
    results = [scan_chsh(args.resolution, a, b, embedding=EMBEDDINGS[args.embedding]) for a, b in pairs]
    if args.csv_out:
        with open(args.csv_out, "w", encoding="utf-8", newline="") as fh:
            for i, res in enumerate(results):
                res.write_csv(fh, header=i == 0, fmt=_fmt)
    fmt = _format(args, out)
    if fmt == "csv":
        for i, res in enumerate(results):
            res.write_csv(out, header=i == 0, fmt=_fmt)
        return
    summary = [
        {"aliceDof": r.alice_dof.value, "bobDof": r.bob_dof.value, "maxAbsS": r.max_abs_s, "S": r.best_s,
         "argmax": {"phiA0": r.best.phi_a0, "phiA1": r.best.phi_a1, "phiB0": r.best.phi_b0, "phiB1": r.best.phi_b1}}
        for r in results
    ]
    if fmt == "json":
        _dump_json({"resolution": args.resolution, "results": summary}, out)
    else:
        for row in summary:
            arg = row["argmax"]
            out.write(f"{row['aliceDof']:>8}/{row['bobDof']:<8} max|S| = {row['maxAbsS']:.10f} at "
                      f"({arg['phiA0']:.6f}, {arg['phiA1']:.6f}, {arg['phiB0']:.6f}, {arg['phiB1']:.6f})\n")


def bell_report(kind: str) -> dict:
    order = list(bell.BellStateId)
    return {
        "analyzer": kind,
        "distributions": {
            which.value: {str(e): p for e, p in bell.analyzer_distribution(which, kind).items()}
            for which in order
        },
        "classification": {str(e): c.to_json() for e, c in bell.classification_map(kind).items()},
        "conclusive": [b.value for b in order if b in bell.conclusively_identified(kind)],
    }


def cmd_bell(args, out):
    kinds = [args.analyzer] if args.analyzer else [k.value for k in bell.AnalyzerKind]
    reports = [bell_report(k) for k in kinds]
    fmt = _format(args, out)
    if fmt == "json":
        _dump_json(reports[0] if len(reports) == 1 else {"analyzers": reports}, out)
    elif fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["analyzer", "bellState", "event", "probability"])
        for rep in reports:
            for which, dist in rep["distributions"].items():
                for event, p in dist.items():
                    writer.writerow([rep["analyzer"], which, event, _fmt(p)])
    else:
        for rep in reports:
            out.write(f"[{rep['analyzer']} analyzer]\n")
            for which, dist in rep["distributions"].items():
                shown = ", ".join(f"{e}: {p:.4f}" for e, p in dist.items())
                out.write(f"  {which:<9} {shown}\n")
            for event, cls in rep["classification"].items():
                tag = "conclusive" if cls["conclusive"] else "inconclusive"
                out.write(f"  {event:<14} -> {{{', '.join(cls['consistent'])}}} {tag}\n")


def cmd_check(args, out):
    results = checks.run_checks()
    for r in results:
        out.write(r.line() + "\n")
    failed = [r for r in results if not r.passed]
    out.write(f"{len(results) - len(failed)}/{len(results)} checks passed\n")
    return 2 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyperhybrid", description="Hybrid beam-splitter interferometer simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_format(p):
        p.add_argument("--format", choices=["json", "csv", "pretty"], default=None,
                       help="output format (default: pretty on a terminal, json otherwise)")
        return p

    def with_dofs(p, default="external"):
        p.add_argument("--alice-dof", choices=[d.value for d in Dof], default=default)
        p.add_argument("--bob-dof", choices=[d.value for d in Dof], default=default)

    p = with_format(sub.add_parser("run", help="run a circuit file and print the output state"))
    p.add_argument("circuit")
    p.set_defaults(func=cmd_run)

    p = with_format(sub.add_parser("tables", help="post-selected outcome table of the interferometer"))
    for name in ("phiR", "phiL", "phiU", "phiD"):
        p.add_argument(f"--{name}", type=float, default=0.0, help="path phase in radians")
    with_dofs(p)
    p.set_defaults(func=cmd_tables)

    p = with_format(sub.add_parser("chsh", help="CHSH value for four settings"))
    p.add_argument("--settings", required=True, help="a0,a1,b0,b1 in radians")
    p.add_argument("--embedding", choices=sorted(EMBEDDINGS), default="difference")
    with_dofs(p)
    p.set_defaults(func=cmd_chsh)

    p = with_format(sub.add_parser("scan", help="grid scan of CHSH settings"))
    p.add_argument("--resolution", type=int, default=16)
    p.add_argument("--embedding", choices=sorted(EMBEDDINGS), default="difference")
    p.add_argument("--csv-out", help="also write the full grid as CSV to this file")
    with_dofs(p, default=None)
    p.set_defaults(func=cmd_scan)

    p = with_format(sub.add_parser("bell", help="Bell-state analyzer distributions and classification"))
    p.add_argument("--analyzer", choices=[k.value for k in bell.AnalyzerKind], default=None)
    p.set_defaults(func=cmd_bell)

    p = sub.add_parser("check", help="run the built-in invariant checks")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out) or 0
    except CircuitSourceError as exc:
        err.write(f"{exc}\n")
        return 1
    except (UsageError, OSError) as exc:
        err.write(f"hyperhybrid: error: {exc}\n")
        return 1
    except InvariantViolation as exc:
        err.write(f"hyperhybrid: invariant violation: {exc}\n")
        return 2
    except (HyperhybridError, ValueError) as exc:
        err.write(f"hyperhybrid: error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
