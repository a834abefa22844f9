"""Command line front end.

Exit status is 0 when every check passes, 1 when at least one fails and 2
for malformed input or usage errors.
"""

from __future__ import annotations

import argparse
from importlib import resources
import json
from pathlib import Path
import sys

from kltbench import (
    __version__,
    acceptance,
    construct,
    diophantine,
    dualgraph,
    planecurve,
)
from kltbench.rational import parse_rational
from kltbench.report import Report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

GRAPH_WHAT = ("coeff", "gap", "det", "discrepancies", "all")


class UsageError(Exception):
    pass


# -- commands ------------------------------------------------------------------


def cmd_graph(expr: str, what: str = "all") -> Report:
    g = dualgraph.parse_graph(expr)
    if g.shape != "tree":
        # report vertex data in the order of the printed normal form
        g = g.canonical()
    rep = Report(f"graph {expr} {what}")
    shown = str(g) if g.shape != "tree" else expr
    if what in ("coeff", "all"):
        rep.add("coeff", shown, None, dualgraph.coefficient(g), "pass")
    if what in ("gap", "all"):
        rep.add("gap", shown, None, dualgraph.gap(g), "pass")
    if what in ("det", "all"):
        rep.add("det", shown, None, dualgraph.determinant(g), "pass")
    if what in ("discrepancies", "all"):
        rep.add("discrepancies", shown, None, dualgraph.discrepancies(g).values, "pass")
    if what == "all":
        rep.add("canonical", expr, None, shown, "pass")
        rep.add("vertices", shown, None, len(g), "pass")
        rep.add("floor", shown, None, dualgraph.gap_floor(g), "pass")
        rep.add("klt", shown, None, dualgraph.discrepancies(g).klt, "pass")
        rep.add("du-val", shown, None, dualgraph.is_du_val(g), "pass")
    return rep


def table_ksq(g_filter: int | None = None) -> Report:
    rep = Report("table ksq" + (f" --g {g_filter}" if g_filter is not None else ""))
    rows = acceptance.data_json("table_ksq.json")["rows"]
    seen = False
    for row in rows:
        if g_filter is not None and row["g"] != g_filter:
            continue
        seen = True
        params = {"g": row["g"]}
        if "k" in row:
            params["k"] = row["k"]
        label = ",".join(f"{k}={v}" for k, v in params.items())
        got = diophantine.ksq_formula(row["family"], params)
        rep.add(f"ksq/{row['family']}/{label}", row["family"], parse_rational(row["value"]), got)
    if not seen:
        raise UsageError(f"no table rows with g = {g_filter}")
    return rep


def cmd_table(which: str, g: int | None = None) -> Report:
    if which == "e35":
        if g is not None:
            raise UsageError("--g applies to the ksq table only")
        return dualgraph.verify_table_e35()
    if which == "ksq":
        return table_ksq(g)
    raise UsageError(f"unknown table {which!r} (choose e35 or ksq)")


def cmd_search(search_id: str, workers: int | None = None, oracle: bool = True) -> Report:
    if search_id not in diophantine.ALL_SEARCHES:
        raise UsageError(f"unknown search {search_id!r} (choose from {', '.join(diophantine.ALL_SEARCHES)})")
    rep = Report(f"search {search_id}")
    acceptance.check_search(search_id, rep, oracle=oracle, workers=workers)
    return rep


def _resolve_script(name: str) -> Path | None:
    path = Path(name)
    if path.exists():
        return path
    bundled = acceptance.fixture_path(path.stem)
    if bundled.is_file():
        return None
    raise UsageError(f"no such construction script: {name}")


def cmd_construct(file: str) -> Report:
    path = _resolve_script(file)
    if path is None:
        with resources.as_file(acceptance.fixture_path(Path(file).stem)) as p:
            return construct.run_file(p).report
    return construct.run_file(path).report


def cmd_curves(action: str, char: int) -> Report:
    if action != "verify-config":
        raise UsageError(f"unknown curves action {action!r}")
    if char < 0 or (char != 0 and not planecurve.is_prime(char)):
        raise UsageError(f"characteristic {char} is not 0 or a prime")
    return planecurve.verify_special_config(char)


def cmd_verify_all() -> Report:
    return acceptance.run_all()


# -- argument parsing ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="print the report as JSON")

    p = argparse.ArgumentParser(prog="kltbench", parents=[common],
                                description="Exact checks for klt dual graphs and rank-one log del Pezzo data.")
    p.add_argument("--version", action="version", version=f"kltbench {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("graph", parents=[common], help="coefficient, gap, determinant of one dual graph")
    g.add_argument("expr", help='bracket expression, e.g. "[2,3,2^2]" or "[2;[2],[2],[2^3]]"')
    g.add_argument("what", nargs="?", default="all", choices=GRAPH_WHAT)

    t = sub.add_parser("table", parents=[common], help="regenerate a stored table")
    t.add_argument("which", help="e35 or ksq")
    t.add_argument("--g", type=int, default=None, help="restrict the ksq table to one g")

    s = sub.add_parser("search", parents=[common], help="run one exhaustive search")
    s.add_argument("id", help=", ".join(diophantine.ALL_SEARCHES))
    s.add_argument("--workers", type=int, default=None, help="worker processes for the enumeration")
    s.add_argument("--no-oracle", action="store_true", help="skip the brute-force cross-check")

    c = sub.add_parser("construct", parents=[common], help="run a construction script")
    c.add_argument("file", help="script path or the name of a bundled fixture")

    cv = sub.add_parser("curves", parents=[common], help="plane-curve configuration checks")
    cv.add_argument("action", choices=("verify-config",))
    cv.add_argument("--char", type=int, required=True, help="0 or a prime")

    sub.add_parser("verify-all", parents=[common], help="run the whole acceptance suite")
    return p


def dispatch(args: argparse.Namespace) -> Report:
    if args.command == "graph":
        return cmd_graph(args.expr, args.what)
    if args.command == "table":
        return cmd_table(args.which, args.g)
    if args.command == "search":
        if args.workers is not None and args.workers < 1:
            raise UsageError("--workers must be positive")
        return cmd_search(args.id, args.workers, not args.no_oracle)
    if args.command == "construct":
        return cmd_construct(args.file)
    if args.command == "curves":
        return cmd_curves(args.action, args.char)
    return cmd_verify_all()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report = dispatch(args)
    except (UsageError, ValueError) as exc:
        # parse errors, bad fixtures, non-contractible graphs, bad characteristics
        print(f"kltbench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "json", False):
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report.to_text())
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
