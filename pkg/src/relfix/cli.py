"""Command-line entry point: ``relfix check | solve | reproduce | properties``."""

from __future__ import annotations

import argparse
import difflib
import sys
from importlib import resources

from . import solver
from .checker import THEOREMS, compare_theorems
from .document import BUILTIN, DocumentError, load, parse_instance, builtin_text
from .report import dumps, jsonable, render_orbit, render_table, scenario, table_data
from .space import exact, fmt
from .verdict import Kind

EXIT_PASS, EXIT_FAIL, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 64
EXAMPLES = ("4.1", "4.2", "4.3")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _theorem_list(text: str) -> list[str]:
    ids = [t.strip() for t in text.split(",") if t.strip()]
    bad = [t for t in ids if t not in THEOREMS]
    if not ids or bad:
        raise argparse.ArgumentTypeError(f"unknown theorem id(s): {', '.join(bad) or '(none)'}; known: {', '.join(THEOREMS)}")
    return ids


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="relfix", description="Check fixed-point theorem hypotheses on concrete instances.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="run hypothesis bundles and print the comparison table")
    c.add_argument("file", help="instance document or built-in name (example4.1, example4.2, example4.3)")
    c.add_argument("--theorems", type=_theorem_list, help="comma-separated ids, e.g. T2.1,T1.17")
    c.add_argument("--budget", type=_positive, help="pair budget for sampled contraction checks")
    c.add_argument("--format", choices=("text", "machine"), default="text")

    s = sub.add_parser("solve", help="run Picard iteration")
    s.add_argument("file")
    s.add_argument("--x0", help="starting point (exact decimal or p/q)")
    s.add_argument("--all-starts", action="store_true", help="start from every point of a finite X(f,R)")
    s.add_argument("--format", choices=("text", "machine"), default="text")

    r = sub.add_parser("reproduce", help="rerun a shipped example and diff it against its golden report")
    r.add_argument("example", help="one of 4.1, 4.2, 4.3")

    q = sub.add_parser("properties", help="randomized cross-module property suite over finite instances")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--cases", type=_positive, default=500)
    q.add_argument("--mutant", choices=("nf-missing-term",), help=argparse.SUPPRESS)
    return p


def _exit_for(kind: Kind) -> int:
    return {Kind.FAILS: EXIT_FAIL, Kind.UNKNOWN: EXIT_UNKNOWN}.get(kind, EXIT_PASS)


def cmd_check(args, out) -> int:
    doc = load(args.file)
    ids = args.theorems or list(doc.theorems) or list(THEOREMS)
    table = compare_theorems(doc.instance, ids, args.budget or doc.budget)
    if args.format == "machine":
        out.write(dumps({**table_data(table), "exit_code": _exit_for(table.overall)}))
    else:
        out.write(render_table(table, doc.instance))
    return _exit_for(table.overall)


def cmd_solve(args, out) -> int:
    doc = load(args.file)
    inst = doc.instance
    if args.all_starts:
        xfr = solver.compute_x_f_r(inst)
        if xfr.empty:
            raise DocumentError("X(f,R) is empty: no admissible start")
        if not xfr.points.is_finite:
            raise DocumentError(f"X(f,R) = {xfr.points} is infinite; --all-starts needs a finite set")
        starts = list(xfr.points.points())
    else:
        x0 = args.x0 if args.x0 is not None else doc.solver.x0
        try:
            starts = [exact(x0) if x0 is not None else None]
        except ValueError as exc:
            raise DocumentError(f"--x0: {exc}") from None
        if starts[0] is not None and not inst.space.contains(starts[0]):
            raise DocumentError(f"--x0 {fmt(starts[0])} is outside the carrier {inst.space.carrier}")
    results = [solver.solve(inst, x, doc.solver.max_iters, doc.solver.tol) for x in starts]
    ok = all(r.fixed_point is not None for r in results)
    if args.format == "machine":
        out.write(dumps({"instance": doc.name, "results": jsonable(results), "exit_code": EXIT_PASS if ok else EXIT_FAIL}))
    else:
        for r in results:
            out.write("\n".join(render_orbit(r, inst)) + "\n")
        if len(results) > 1:
            limits = sorted({r.orbit.limit for r in results if r.orbit.converged})
            out.write(f"limits: {{{', '.join(fmt(x) for x in limits)}}} from starts {{{', '.join(fmt(x) for x in starts)}}}\n")
    return EXIT_PASS if ok else EXIT_FAIL


def golden_text(example: str) -> str:
    return resources.files("relfix").joinpath(f"data/golden/example{example}.txt").read_text(encoding="utf-8")


def reproduce_text(example: str) -> str:
    doc = parse_instance(builtin_text(f"example{example}"))
    return scenario(doc, list(doc.theorems))


def cmd_reproduce(args, out) -> int:
    if args.example not in EXAMPLES:
        sys.stderr.write(f"relfix reproduce: unknown example {args.example!r}; choose from {', '.join(EXAMPLES)}\n")
        return EXIT_USAGE
    actual = reproduce_text(args.example)
    expected = golden_text(args.example)
    out.write(actual)
    if actual == expected:
        out.write(f"golden report for example {args.example}: match\n")
        return EXIT_PASS
    diff = difflib.unified_diff(expected.splitlines(True), actual.splitlines(True), "golden", "actual")
    out.write("".join(diff))
    out.write(f"golden report for example {args.example}: MISMATCH\n")
    return EXIT_FAIL


def cmd_properties(args, out) -> int:
    from .properties import run_suite

    result = run_suite(args.seed, args.cases, mutant=args.mutant)
    out.write(result.render())
    return EXIT_PASS if result.ok else EXIT_FAIL


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    handler = {"check": cmd_check, "solve": cmd_solve, "reproduce": cmd_reproduce, "properties": cmd_properties}[args.command]
    try:
        return handler(args, out)
    except DocumentError as exc:
        sys.stderr.write(f"relfix {args.command}: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        sys.stderr.write(f"relfix {args.command}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
