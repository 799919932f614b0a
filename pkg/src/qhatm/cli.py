"""Command-line front end.

Commands: solve, eval, hcurve, errgrid, residual, table45.  Problems come
from the built-in library (--problem) or a custom JSON document (--custom).
Output is CSV or JSON on stdout or --output.

Exit codes: 0 success, 2 usage error, 3 domain/numeric error, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Mapping

from . import __version__
from .analysis import (
    errgrid_csv,
    error_grid,
    format_number,
    grid_values,
    h_curve,
    hcurve_csv,
    residual_csv,
    residual_sweep,
    table45_csv,
    table_ex45,
)
from .engine import QhatmParams, solve
from .problems import BUILTIN_NAMES, ProblemFormatError, ProblemSpec, builtin, load_custom

USAGE_ERROR = 2
DOMAIN_ERROR = 3
IO_ERROR = 4


class UsageError(Exception):
    """Invalid flags or flag values; reported with exit code 2."""


def _parse_point(text: str) -> dict[str, float]:
    """Parse comma-separated name=value pairs, e.g. 'x=1.5,t=0.01'."""
    point = {}
    for chunk in text.split(","):
        if "=" not in chunk:
            raise UsageError(f"--point entry {chunk!r} is not of the form name=value")
        name, _, value = chunk.partition("=")
        try:
            point[name.strip()] = float(value)
        except ValueError:
            raise UsageError(f"--point value {value!r} for {name!r} is not a number") from None
    if not point:
        raise UsageError("--point must contain at least one name=value pair")
    return point


def _parse_grid(text: str) -> dict[str, tuple[float, float, float]]:
    """Parse comma-separated name=start:stop:step ranges."""
    grid = {}
    for chunk in text.split(","):
        if "=" not in chunk:
            raise UsageError(f"--grid entry {chunk!r} is not of the form name=start:stop:step")
        name, _, spec = chunk.partition("=")
        parts = spec.split(":")
        if len(parts) != 3:
            raise UsageError(f"--grid range {spec!r} for {name!r} must be start:stop:step")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise UsageError(f"--grid range {spec!r} for {name!r} has a non-numeric part") from None
        grid[name.strip()] = (start, stop, step)
    if not grid:
        raise UsageError("--grid must contain at least one range")
    return grid


def _add_common(sub: argparse.ArgumentParser, with_params: bool = True) -> None:
    group = sub.add_mutually_exclusive_group()
    group.add_argument("--problem", choices=sorted(BUILTIN_NAMES), help="built-in problem name")
    group.add_argument("--custom", metavar="PATH", help="path to a custom-problem JSON document")
    if with_params:
        sub.add_argument("--gamma", type=float, help="numeric fractional order")
        sub.add_argument("--h", type=float, help="convergence-control parameter")
        sub.add_argument("--n", type=int, default=1, help="asymptotic parameter (default 1)")
    sub.add_argument("--order", type=int, default=3, help="truncation order M (default 3)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    sub.add_argument("--output", metavar="PATH", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qhatm",
        description="Series solutions of linear fractional telegraph problems.",
    )
    parser.add_argument("--version", action="version", version=f"qhatm {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("solve", help="compute iterates and the assembled series")
    _add_common(sub)

    sub = commands.add_parser("eval", help="evaluate the assembled series at one point")
    _add_common(sub)
    sub.add_argument("--point", help="comma-separated name=value pairs")

    sub = commands.add_parser("hcurve", help="sweep the series value against h at a fixed point")
    _add_common(sub)
    sub.add_argument("--point", help="comma-separated name=value pairs")
    sub.add_argument("--h-min", type=float, dest="h_min", help="left end of the h grid")
    sub.add_argument("--h-max", type=float, dest="h_max", help="right end of the h grid")
    sub.add_argument("--steps", type=int, help="number of h samples (>= 2)")

    sub = commands.add_parser("errgrid", help="absolute error against the exact solution on a grid")
    _add_common(sub)
    sub.add_argument("--grid", help="comma-separated name=start:stop:step ranges")

    sub = commands.add_parser("residual", help="equation defect of the series at points")
    _add_common(sub)
    sub.add_argument("--point", help="comma-separated name=value pairs")
    sub.add_argument("--grid", help="comma-separated name=start:stop:step ranges")

    sub = commands.add_parser("table45", help="built-in ex45 comparison table")
    sub.add_argument("--order", type=int, default=3, help="truncation order M >= 3 (default 3)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--output", metavar="PATH")

    return parser


def _resolve_problem(args) -> ProblemSpec:
    if getattr(args, "custom", None):
        try:
            with open(args.custom, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"--custom: cannot read {args.custom!r}: {exc}") from exc
        try:
            return load_custom(text)
        except ProblemFormatError as exc:
            raise UsageError(f"--custom: {exc}") from exc
    if getattr(args, "problem", None):
        return builtin(args.problem)
    raise UsageError("one of --problem or --custom is required")


def _resolve_params(args, spec: ProblemSpec) -> QhatmParams:
    if args.gamma is None:
        raise UsageError("--gamma is required")
    if args.h is None:
        raise UsageError("--h is required")
    params = QhatmParams(gamma=args.gamma, h=args.h, n=args.n, order=args.order)
    try:
        params.validate_for(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return params


def _series_terms(series) -> list[dict]:
    return [
        {
            "coeff": t.coeff,
            "p": t.exponent.p,
            "q": t.exponent.q,
            "factor": series.catalog.factors[t.factor].name,
        }
        for t in series.terms
    ]


def _params_doc(params: QhatmParams) -> dict:
    return {"gamma": params.gamma, "h": params.h, "n": params.n, "order": params.order}


def _run_solve(args) -> str:
    spec = _resolve_problem(args)
    params = _resolve_params(args, spec)
    sol = solve(spec, params)
    if args.format == "json":
        doc = {
            "problem": spec.name,
            "params": _params_doc(params),
            "version": __version__,
            "iterates": [_series_terms(v) for v in sol.iterates],
            "assembled": _series_terms(sol.assembled),
        }
        return json.dumps(doc, indent=2) + "\n"
    lines = ["part,coeff,p,q,factor"]
    parts = [(f"v{m}", v) for m, v in enumerate(sol.iterates)] + [("assembled", sol.assembled)]
    for label, series in parts:
        for t in series.terms:
            factor = series.catalog.factors[t.factor].name
            lines.append(
                f"{label},{format_number(t.coeff)},{t.exponent.p},{t.exponent.q},{factor}"
            )
    return "\n".join(lines) + "\n"


def _run_eval(args) -> str:
    spec = _resolve_problem(args)
    params = _resolve_params(args, spec)
    if not args.point:
        raise UsageError("--point is required for eval")
    point = _parse_point(args.point)
    missing = [v for v in spec.variables if v not in point]
    if missing:
        raise UsageError(f"--point is missing variables {missing} for {spec.name!r}")
    sol = solve(spec, params)
    value = sol.evaluate(point)
    if args.format == "json":
        doc = {
            "problem": spec.name,
            "params": _params_doc(params),
            "version": __version__,
            "point": point,
            "value": value,
        }
        return json.dumps(doc, indent=2) + "\n"
    return format_number(value) + "\n"


def _run_hcurve(args) -> str:
    spec = _resolve_problem(args)
    if args.gamma is None:
        raise UsageError("--gamma is required")
    if not args.point:
        raise UsageError("--point is required for hcurve")
    if args.h_min is None or args.h_max is None or args.steps is None:
        raise UsageError("--h-min, --h-max and --steps are required for hcurve")
    try:
        # h varies across the sweep; validate the fixed knobs once up front
        QhatmParams(gamma=args.gamma, h=0.0, n=args.n, order=args.order).validate_for(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    point = _parse_point(args.point)
    try:
        points = h_curve(
            spec, args.gamma, args.n, args.order, point, args.h_min, args.h_max, args.steps
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.format == "json":
        doc = {
            "problem": spec.name,
            "gamma": args.gamma,
            "n": args.n,
            "order": args.order,
            "point": point,
            "version": __version__,
            "curve": [
                {"h": p.h, "value": p.value, "divergent": p.divergent} for p in points
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    return hcurve_csv(points)


def _run_errgrid(args) -> str:
    spec = _resolve_problem(args)
    params = _resolve_params(args, spec)
    if not args.grid:
        raise UsageError("--grid is required for errgrid")
    grid = _parse_grid(args.grid)
    missing = [v for v in spec.variables if v not in grid]
    if missing:
        raise UsageError(f"--grid is missing variables {missing} for {spec.name!r}")
    records = error_grid(spec, params, grid)
    if args.format == "json":
        doc = {
            "problem": spec.name,
            "params": _params_doc(params),
            "version": __version__,
            "records": [
                {
                    "point": dict(r.point),
                    "approx": r.approx,
                    "exact": r.exact,
                    "abs_err": r.abs_err,
                }
                for r in records
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    return errgrid_csv(records, spec)


def _run_residual(args) -> str:
    spec = _resolve_problem(args)
    params = _resolve_params(args, spec)
    if args.point:
        point = _parse_point(args.point)
        missing = [v for v in spec.variables if v not in point]
        if missing:
            raise UsageError(f"--point is missing variables {missing} for {spec.name!r}")
        points = [point]
    elif args.grid:
        grid = _parse_grid(args.grid)
        missing = [v for v in spec.variables if v not in grid]
        if missing:
            raise UsageError(f"--grid is missing variables {missing} for {spec.name!r}")
        axes = {v: grid_values(*grid[v]) for v in spec.variables}
        points = [{}]
        for v in spec.variables:
            points = [dict(p, **{v: value}) for p in points for value in axes[v]]
    else:
        raise UsageError("one of --point or --grid is required for residual")
    results = residual_sweep(spec, params, points)
    if args.format == "json":
        doc = {
            "problem": spec.name,
            "params": _params_doc(params),
            "version": __version__,
            "results": [{"point": p, "abs_residual": r} for p, r in results],
        }
        return json.dumps(doc, indent=2) + "\n"
    return residual_csv(results, spec)


def _run_table45(args) -> str:
    if args.order < 3:
        raise UsageError(f"--order must be >= 3 for table45, got {args.order}")
    rows = table_ex45(args.order)
    if args.format == "json":
        doc = {
            "problem": "ex45",
            "order": args.order,
            "version": __version__,
            "rows": [
                {
                    "xyz": r.xyz,
                    "t": r.t,
                    "qhatm": r.qhatm,
                    "exact": r.exact,
                    "abs_err": r.abs_err,
                    "paper_qhatm": r.paper_qhatm,
                    "paper_exact": r.paper_exact,
                }
                for r in rows
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    return table45_csv(rows)


_RUNNERS = {
    "solve": _run_solve,
    "eval": _run_eval,
    "hcurve": _run_hcurve,
    "errgrid": _run_errgrid,
    "residual": _run_residual,
    "table45": _run_table45,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse has already reported the problem
        code = exc.code
        return code if isinstance(code, int) else USAGE_ERROR

    try:
        output = _RUNNERS[args.command](args)
    except UsageError as exc:
        print(f"qhatm {args.command}: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ValueError, KeyError, ArithmeticError) as exc:
        print(f"qhatm {args.command}: {exc}", file=sys.stderr)
        return DOMAIN_ERROR
    except OSError as exc:
        print(f"qhatm {args.command}: I/O error: {exc}", file=sys.stderr)
        return IO_ERROR

    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(output)
        else:
            sys.stdout.write(output)
    except OSError as exc:
        print(f"qhatm {args.command}: I/O error: {exc}", file=sys.stderr)
        return IO_ERROR
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
