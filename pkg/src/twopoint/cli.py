"""Command-line interface: solve one equation, reproduce the benchmark
tables, or dump per-iteration data for plotting.

Exit codes: 0 when the run converged, 2 for any non-convergent outcome, and
1 for usage errors (bad flags, unparseable expressions, unknown problems).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence, TextIO

from . import analysis, corpus
from .expressions import Expression, ParseError, parse
from .solvers import (
    DEFAULT_DELTA_REL,
    Converged,
    DerivativeStall,
    Diverged,
    DomainFailure,
    GuardedNewton,
    Method,
    Oscillating,
    Perturb,
    SeedingError,
    SolverConfig,
    Trace,
    solve,
)

TRACE_COLUMNS = ("k", "x", "y", "dy", "r_weight", "abs_error", "ck")
BENCH_COLUMNS = ("problem", "start", "method", "outcome", "iterations", "final_x", "comparison")


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the contract reserves 2 for
    # non-convergence, so route usage problems to exit 1 instead
    def error(self, message):
        raise _UsageError(message)


def _num(value: float) -> str:
    """Shortest round-trip text; blank for NaN."""
    if math.isnan(value):
        return ""
    return repr(value)


def _json_num(value: float):
    return None if math.isnan(value) else value


def _describe(outcome) -> str:
    if isinstance(outcome, Converged):
        return f"converged to {outcome.root!r} in {outcome.iterations} iterations"
    if isinstance(outcome, Diverged):
        return f"diverged (last x = {outcome.last_x!r})"
    if isinstance(outcome, Oscillating):
        return f"oscillating with period {outcome.period}"
    if isinstance(outcome, DomainFailure):
        return f"domain failure at iteration {outcome.iteration}: {outcome.detail}"
    if isinstance(outcome, DerivativeStall):
        return f"derivative stall at iteration {outcome.iteration}"
    return f"iteration budget exhausted (last x = {outcome.last_x!r})"


def trace_rows(trace: Trace, reference_root: float | None) -> list[dict]:
    """Per-iteration cells in TRACE_COLUMNS order; None marks a blank."""
    ck: list[float | None] = [None] * len(trace.records)
    errors: list[float] | None = None
    if reference_root is not None:
        errors = [rec.x - reference_root for rec in trace.records]
        if len(trace.records) >= 2:
            report = analysis.ck_sequence(analysis.ErrorSequence(reference_root, tuple(errors)))
            for i, (value, ok) in enumerate(zip(report.ck, report.valid_mask)):
                if ok:
                    ck[i] = value
    rows = []
    for i, rec in enumerate(trace.records):
        rows.append(
            {
                "k": rec.k,
                "x": rec.x,
                "y": rec.y,
                "dy": rec.dy,
                "r_weight": rec.r_weight,
                "abs_error": abs(errors[i]) if errors is not None else math.nan,
                "ck": ck[i] if ck[i] is not None else math.nan,
            }
        )
    return rows


def _write_trace_csv(rows: list[dict], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for row in rows:
        writer.writerow([str(row["k"])] + [_num(row[col]) for col in TRACE_COLUMNS[1:]])


def _comparison(outcome, iterations: int, expected: corpus.ExpectedResult | None) -> str:
    if expected is None:
        return ""
    if expected.kind == "iterations":
        if isinstance(outcome, Converged):
            delta = iterations - expected.count
            return "match" if delta == 0 else f"count-delta={delta:+d}"
        return "mismatch"
    matched = {
        "oscillates": Oscillating,
        "diverges": Diverged,
        "fails": DomainFailure,
    }[expected.kind]
    return "match" if isinstance(outcome, matched) else "mismatch"


# --- argument plumbing -------------------------------------------------------


def _add_selection_args(p: argparse.ArgumentParser, with_x0: bool = True) -> None:
    p.add_argument("--expr", help="expression text in the variable x")
    p.add_argument("--problem", help="name of a builtin (or --problems file) problem")
    p.add_argument("--problems", help="JSON problem file adding lookup names for --problem")
    p.add_argument("--method", required=True, choices=[m.value for m in Method])
    if with_x0:
        p.add_argument("--x0", type=float, required=True)
        p.add_argument("--x1", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=int, dest="max_iter")
    p.add_argument("--seed", choices=["perturb", "guarded-newton"], default="perturb")
    p.add_argument("--delta", type=float)


def _build_config(args) -> SolverConfig:
    kwargs = {}
    if args.tol is not None:
        kwargs["tol"] = args.tol
    if args.max_iter is not None:
        kwargs["max_iter"] = args.max_iter
    if args.seed == "guarded-newton":
        kwargs["seed_strategy"] = GuardedNewton()
    else:
        delta = args.delta if args.delta is not None else DEFAULT_DELTA_REL
        kwargs["seed_strategy"] = Perturb(delta)
    return SolverConfig(**kwargs)


def _select(args) -> tuple[Expression, float | None, str]:
    """Resolve --expr/--problem to (expression, reference root, label)."""
    if (args.expr is None) == (args.problem is None):
        raise _UsageError("exactly one of --expr or --problem is required")
    if args.expr is not None:
        return parse(args.expr), None, args.expr
    pool: list = []
    if args.problems:
        pool.extend(corpus.load_problems(args.problems))
    pool.extend(corpus.builtin_problems())
    for prob in pool:
        if prob.name == args.problem:
            return prob.expression, prob.reference_root, prob.name
    raise KeyError(f"no problem named {args.problem!r}")


# --- subcommands --------------------------------------------------------------


def _cmd_solve(args) -> int:
    expression, root, label = _select(args)
    config = _build_config(args)
    if args.x1 is not None and args.x1 == args.x0:
        raise _UsageError("--x1 must differ from --x0")
    trace = solve(expression, Method(args.method), args.x0, config, args.x1)
    outcome = trace.outcome
    rows = trace_rows(trace, root)
    if args.format == "json":
        payload = {
            "problem": label,
            "method": trace.method.value,
            "outcome": outcome.label,
            "root": outcome.root if isinstance(outcome, Converged) else None,
            "iterations": trace.iterations,
            "final_x": _json_num(trace.records[-1].x),
        }
        if args.verbose:
            payload["records"] = [{k: (v if k == "k" else _json_num(v)) for k, v in row.items()} for row in rows]
        print(json.dumps(payload))
    elif args.format == "csv":
        _write_trace_csv(rows, sys.stdout)
        print(_describe(outcome), file=sys.stderr)
    else:
        print(f"problem:    {label}")
        print(f"method:     {trace.method.value}")
        print(f"outcome:    {outcome.label}")
        if isinstance(outcome, Converged):
            print(f"root:       {_num(outcome.root)}")
        print(f"iterations: {trace.iterations}")
        print(f"final x:    {_num(trace.records[-1].x)}")
        if args.verbose:
            print()
            print("    k  x                        y                        dy                       r")
            for rec in trace.records:
                cells = [_num(v).ljust(24) for v in (rec.x, rec.y, rec.dy)]
                print(f"  {rec.k:>3d}  " + "".join(cells) + _num(rec.r_weight))
    return 0 if isinstance(outcome, Converged) else 2


def _cmd_trace(args) -> int:
    expression, root, label = _select(args)
    config = _build_config(args)
    if args.x1 is not None and args.x1 == args.x0:
        raise _UsageError("--x1 must differ from --x0")
    trace = solve(expression, Method(args.method), args.x0, config, args.x1)
    rows = trace_rows(trace, root)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            _write_trace_csv(rows, fh)
    else:
        _write_trace_csv(rows, sys.stdout)
    print(_describe(trace.outcome), file=sys.stderr)
    return 0 if isinstance(trace.outcome, Converged) else 2


_BENCH_METHODS = (Method.SECANT, Method.NEWTON, Method.TWO_POINT)


def bench_rows(tables: Sequence[int]) -> list[dict]:
    """One row per (problem, start, method), in deterministic table order."""
    config = SolverConfig()
    rows = []
    for table in tables:
        problems = corpus.table1_problems() if table == 1 else corpus.table2_problems()
        for prob in problems:
            for start in prob.starts:
                for method in _BENCH_METHODS:
                    trace = solve(prob.expression, method, start, config)
                    expected = prob.expected.get((method, start))
                    rows.append(
                        {
                            "problem": prob.name,
                            "start": start,
                            "method": method.value,
                            "outcome": trace.outcome.label,
                            "iterations": trace.iterations,
                            "final_x": trace.records[-1].x,
                            "comparison": _comparison(trace.outcome, trace.iterations, expected),
                        }
                    )
    return rows


def _cmd_bench(args) -> int:
    tables = {"1": (1,), "2": (2,), "all": (1, 2)}[args.table]
    rows = bench_rows(tables)
    if args.format == "json":
        payload = [dict(row, final_x=_json_num(row["final_x"])) for row in rows]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(BENCH_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row["problem"],
                    _num(row["start"]),
                    row["method"],
                    row["outcome"],
                    str(row["iterations"]),
                    _num(row["final_x"]),
                    row["comparison"],
                ]
            )
        text = buf.getvalue()
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as err:
            print(f"error: cannot write {args.out!r}: {err}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 0


def _make_parser() -> _ArgumentParser:
    parser = _ArgumentParser(prog="twopoint", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a single equation")
    _add_selection_args(p_solve)
    p_solve.add_argument("--format", choices=["table", "json", "csv"], default="table")
    p_solve.add_argument("--verbose", action="store_true")
    p_solve.set_defaults(func=_cmd_solve)

    p_bench = sub.add_parser("bench", help="run the builtin benchmark tables")
    p_bench.add_argument("--table", choices=["1", "2", "all"], default="all")
    p_bench.add_argument("--out")
    p_bench.add_argument("--format", choices=["csv", "json"], default="csv")
    p_bench.set_defaults(func=_cmd_bench)

    p_trace = sub.add_parser("trace", help="emit per-iteration CSV for one run")
    _add_selection_args(p_trace)
    p_trace.add_argument("--out")
    p_trace.set_defaults(func=_cmd_trace)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except SeedingError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ParseError, KeyError, corpus.ProblemFileError, ValueError, OSError) as err:
        message = err.args[0] if isinstance(err, KeyError) and err.args else err
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
