"""Command-line entry point: ``picod <command> ...``.

Exit codes: 0 success or feasible, 2 infeasible, 3 unknown or no scheme,
4 construction invalid, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .field import is_prime
from .code import CodeError, LinearCode, deserialize, serialize
from .instance import Instance, InvalidInstance, Regime, RegimeError, centralized_bounds, classify, gap_report
from .schemes import BUILDERS, ConstructionInvalid, NoKnownScheme, PreconditionError, build_best
from .search import (
    DEFAULT_NODE_BUDGET,
    DEFAULT_TIME_BUDGET,
    SearchStatus,
    min_length_search,
)
from .verify import VerificationReport, verify

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_UNKNOWN = 3
EXIT_CONSTRUCTION_INVALID = 4
EXIT_USAGE = 64

NODE_BUDGET_ENV = "PICOD_NODE_BUDGET"
TIME_BUDGET_ENV = "PICOD_TIME_BUDGET"
SEARCH_CEILING = 10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _env_number(name: str, default, kind):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return kind(raw)
    except ValueError:
        raise UsageError(f"{name}={raw!r} is not a valid {kind.__name__}") from None


def fmt_rational(x: Fraction | None) -> str:
    """'30/8' style values shown with a decimal alongside; integers stay plain."""
    if x is None:
        return "open"
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x} ({float(x):.4f})"


def _json_rational(x: Fraction | None):
    if x is None:
        return None
    x = Fraction(x)
    return {"fraction": str(x), "decimal": float(x)}


def _instance(args) -> Instance:
    try:
        return Instance(args.m, args.s)
    except InvalidInstance as exc:
        raise UsageError(str(exc)) from None


def _prime(p: int) -> int:
    if not is_prime(p):
        raise UsageError(f"--p must be prime, got {p}")
    return p


def _emit(text: str, out: str | None = None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# classify / bounds

def _bounds_doc(inst: Instance, with_central: bool) -> dict:
    cls = classify(inst)
    doc = {
        "m": inst.m,
        "s": inst.s,
        "regime": cls.regime.value,
        "label": cls.label(),
        "infeasibility_case": cls.infeasibility_case,
        "all_cases": list(cls.all_cases),
        "lower_bound": _json_rational(cls.lower_bound),
        "upper_bound": _json_rational(cls.upper_bound),
        "optimum": _json_rational(cls.optimum),
    }
    if with_central:
        cb = centralized_bounds(inst)
        doc["centralized"] = {
            "it_optimal": _json_rational(cb.it_optimal),
            "linear_optimal": _json_rational(cb.linear_optimal),
            "infeasible": cb.infeasible,
        }
        doc["gap"] = _json_rational(gap_report(inst))
    return doc


def cmd_classify(args, with_central=False) -> int:
    inst = _instance(args)
    if args.format == "json":
        print(json.dumps(_bounds_doc(inst, with_central), indent=2))
        return EXIT_OK
    cls = classify(inst)
    print(cls.label())
    if len(cls.all_cases) > 1:
        print(f"also cases: {', '.join(map(str, cls.all_cases[1:]))}")
    if cls.regime is not Regime.INFEASIBLE_LINEAR:
        print(f"lower: {fmt_rational(cls.lower_bound)}")
        print(f"upper: {fmt_rational(cls.upper_bound)}")
    if with_central:
        cb = centralized_bounds(inst)
        if cb.infeasible:
            print("centralized: infeasible")
        else:
            if cb.it_optimal is not None:
                print(f"centralized-it: {fmt_rational(cb.it_optimal)}")
            if cb.linear_optimal is not None:
                print(f"centralized-linear: {fmt_rational(cb.linear_optimal)}")
        gap = gap_report(inst)
        print(f"gap: {fmt_rational(gap) if gap is not None else 'n/a'}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    return cmd_classify(args, with_central=True)


# scheme / verify

def _print_report(report: VerificationReport, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report.to_dict(), indent=2))
        return
    for r in report.per_user:
        dec = f" decodes w{r.decoded}" if r.decoded is not None else ""
        print(f"u{r.user}: {r.status.value}{dec}")
    print(f"feasible: {str(report.feasible).lower()}  length: {fmt_rational(report.length)}  sum_b: {sum(report.ranges)}")


def cmd_scheme(args) -> int:
    inst = _instance(args)
    _prime(args.p)
    try:
        if args.construction == "auto":
            scheme = build_best(inst.m, inst.s, args.p)
            code, name = scheme.code, scheme.construction
        else:
            code, name = BUILDERS[args.construction](inst.m, inst.s, args.p), args.construction
    except RegimeError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (NoKnownScheme, PreconditionError) as exc:
        print(f"no known scheme: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except ConstructionInvalid as exc:
        print(f"construction invalid: {exc}", file=sys.stderr)
        if exc.report is not None:
            for r in exc.report.failing():
                print(f"  u{r.user}: {r.status.value}", file=sys.stderr)
        return EXIT_CONSTRUCTION_INVALID
    report = verify(code)
    if args.out:
        Path(args.out).write_text(serialize(code))
    else:
        sys.stdout.write(serialize(code))
    print(f"construction: {name}  rows: {len(code.rows)}  length: {fmt_rational(code.length)}  "
          f"feasible: {str(report.feasible).lower()}", file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def _load_code(path: str) -> LinearCode:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    try:
        return deserialize(text)
    except (CodeError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"malformed code document {path}: {exc}") from None


def cmd_verify(args) -> int:
    code = _load_code(args.path)
    report = verify(code)
    _print_report(report, args.format)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


# search

def _status_label(out) -> str:
    if out.status is SearchStatus.INFEASIBLE_CERTIFIED and not out.exhaustive:
        return f"InfeasibleCertified-up-to-{out.max_rank_searched}"
    return out.status.value


def cmd_search(args) -> int:
    inst = _instance(args)
    node_budget = args.node_budget if args.node_budget is not None else _env_number(NODE_BUDGET_ENV, DEFAULT_NODE_BUDGET, int)
    time_budget = args.time_budget if args.time_budget is not None else _env_number(TIME_BUDGET_ENV, DEFAULT_TIME_BUDGET, float)
    _prime(args.p)
    warm = _load_code(args.warm_start) if args.warm_start else None
    if args.t < 1:
        raise UsageError("--t must be at least 1")
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    try:
        out = min_length_search(inst, p=args.p, t=args.t, max_len=args.max_len, node_budget=node_budget,
                                time_budget=time_budget, warm_start=warm, workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        print(json.dumps(out.to_dict(), indent=2))
    else:
        print(_status_label(out))
        if out.code is not None:
            print(f"length: {fmt_rational(out.length)}  rows: {len(out.code.rows)}")
        elif out.best_found is not None:
            print(f"best found: {fmt_rational(out.best_found.length)}")
        st = out.stats.to_dict()
        print("pool: {}  nodes: {}  evaluated: {}  elapsed: {:.2f}s".format(
            out.pool_size, st["nodes"], st["evaluated"], st["elapsed_seconds"]))
        if out.note:
            print(f"note: {out.note}")
    if args.out and out.code is not None:
        Path(args.out).write_text(serialize(out.code))
    return {
        SearchStatus.OPTIMAL: EXIT_OK,
        SearchStatus.INFEASIBLE_CERTIFIED: EXIT_INFEASIBLE,
        SearchStatus.UNKNOWN: EXIT_UNKNOWN,
    }[out.status]


# table

TABLE_COLUMNS = ["m", "s", "regime", "lower", "upper", "central_it", "central_linear", "gap", "searched"]


def _cell(x: Fraction | None, missing: str) -> str:
    if x is None:
        return missing
    x = Fraction(x)
    return str(x)


def table_rows(m_max: int, with_search: bool = False, node_budget: int | None = None,
               time_budget: float | None = None) -> list[dict[str, str]]:
    rows = []
    for m in range(2, m_max + 1):
        for s in range(1, m):
            inst = Instance(m, s)
            cls = classify(inst)
            cb = centralized_bounds(inst)
            infeasible = cls.regime is Regime.INFEASIBLE_LINEAR
            row = {
                "m": str(m),
                "s": str(s),
                "regime": cls.label(),
                "lower": "-" if infeasible else _cell(cls.lower_bound, "open"),
                "upper": "-" if infeasible else _cell(cls.upper_bound, "open"),
                "central_it": "infeasible" if cb.infeasible else _cell(cb.it_optimal, "-"),
                "central_linear": "infeasible" if cb.infeasible else _cell(cb.linear_optimal, "-"),
                "gap": _cell(gap_report(inst), "-" if infeasible else "open"),
                "searched": "",
            }
            if with_search:
                out = min_length_search(inst, node_budget=node_budget, time_budget=time_budget)
                if out.status is SearchStatus.OPTIMAL:
                    row["searched"] = str(out.length)
                elif out.status is SearchStatus.INFEASIBLE_CERTIFIED:
                    row["searched"] = "none"
                else:
                    row["searched"] = "unknown"
            rows.append(row)
    return rows


def render_table(rows: list[dict[str, str]], fmt: str, with_search: bool) -> str:
    cols = TABLE_COLUMNS if with_search else TABLE_COLUMNS[:-1]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    lines += ["| " + " | ".join(r[c] for c in cols) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def cmd_table(args) -> int:
    if args.m_max < 2:
        raise UsageError("--m-max must be at least 2")
    if args.with_search and args.m_max > args.search_ceiling:
        raise UsageError(f"--with-search needs --m-max <= {args.search_ceiling} (raise --search-ceiling)")
    node_budget = _env_number(NODE_BUDGET_ENV, DEFAULT_NODE_BUDGET, int)
    time_budget = _env_number(TIME_BUDGET_ENV, DEFAULT_TIME_BUDGET, float)
    rows = table_rows(args.m_max, args.with_search, node_budget, time_budget)
    _emit(render_table(rows, args.format, args.with_search), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="picod", description="Secure decentralized pliable index coding toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_ms(sp):
        sp.add_argument("--m", type=int, required=True, help="number of messages / users")
        sp.add_argument("--s", type=int, required=True, help="side-information window size")

    for name, help_ in (("classify", "regime of an instance"), ("bounds", "bounds plus centralized comparison")):
        sp = sub.add_parser(name, help=help_)
        add_ms(sp)
        sp.add_argument("--format", choices=["text", "json"], default="text")

    sp = sub.add_parser("scheme", help="build and verify a code")
    add_ms(sp)
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--construction", choices=["auto", *BUILDERS], default="auto")
    sp.add_argument("--out", help="write the code document here (default stdout)")

    sp = sub.add_parser("verify", help="verify a code document")
    sp.add_argument("path", help="code document, or - for stdin")
    sp.add_argument("--format", choices=["text", "json"], default="text")

    sp = sub.add_parser("search", help="exhaustive minimum-length search")
    add_ms(sp)
    sp.add_argument("--t", type=int, default=1, help="symbols per message")
    sp.add_argument("--p", type=int, default=2, help="field size (prime)")
    sp.add_argument("--max-len", type=int, help="largest row count to try")
    sp.add_argument("--node-budget", type=int, help=f"default ${NODE_BUDGET_ENV} or {DEFAULT_NODE_BUDGET}")
    sp.add_argument("--time-budget", type=float, help=f"seconds; default ${TIME_BUDGET_ENV} or {DEFAULT_TIME_BUDGET:g}")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--warm-start", help="feasible code document bounding the depth")
    sp.add_argument("--format", choices=["text", "json"], default="text")
    sp.add_argument("--out", help="write the optimal code document here")

    sp = sub.add_parser("table", help="regime table for all 2 <= m <= m-max")
    sp.add_argument("--m-max", type=int, required=True)
    sp.add_argument("--format", choices=["csv", "md"], default="csv")
    sp.add_argument("--with-search", action="store_true", help="add the scalar GF(2) search optimum")
    sp.add_argument("--search-ceiling", type=int, default=SEARCH_CEILING)
    sp.add_argument("--out")
    return parser


COMMANDS = {
    "classify": cmd_classify,
    "bounds": cmd_bounds,
    "scheme": cmd_scheme,
    "verify": cmd_verify,
    "search": cmd_search,
    "table": cmd_table,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"picod {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
