"""Command-line front end.

Subcommands: eval, plan, compare, table1, verify.  Exit codes: 0 on
success, 2 for invalid arguments, 3 for a numerical precondition failure
(e.g. a vacuous gamma constant), 4 when the verification suite fails.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .bounds import BoundInvalidError
from .coefficients import VAR_X_SQUARED
from .engine import (cost_ratio, plan_only, ps_fixed, ps_mixed_exp,
                     ps_mixed_general, snap_to_lattice)
from .harness import (ComparisonRecord, ExperimentConfig, make_series,
                      reference_eval, relative_error, run_table1,
                      table_to_csv)
from .precision import (MPMatrix, PrecisionCtx, matrix_from_csv,
                        matrix_from_json, matrix_to_csv, matrix_to_json,
                        round_to, scale_pow2)
from .gallery import GENERATORS, generate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_ACCEPTANCE = 4


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--matrix", required=True,
                   help="generator name (%s) or a .json/.csv matrix file"
                   % "|".join(sorted(GENERATORS)))
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--triu-scale", type=float, default=100.0)
    p.add_argument("--scale-l", type=int, default=0,
                   help="scale the matrix by 2^(-l) before evaluation")
    p.add_argument("--series", default="taylor_exp",
                   choices=["taylor_exp", "pade_exp_num", "pade_exp_den",
                            "taylor_cos"])
    p.add_argument("--m", type=int, default=16, help="approximant degree")
    p.add_argument("--digits", type=int, default=32,
                   help="working precision in decimal digits")
    p.add_argument("--delta", type=float, default=10.0)
    p.add_argument("--fix-params", action=argparse.BooleanOptionalAction,
                   default=True)
    p.add_argument("--lattice", default=None,
                   help="comma-separated available digit counts")
    p.add_argument("--out", default=None, help="write output to a file")
    p.add_argument("--format", default="json", choices=["json", "csv"])


def _parse_lattice(text: Optional[str]):
    if not text:
        return None
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise SystemExit(EXIT_USAGE)


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _load_argument(args):
    """The (X, series) pair for the run; files bypass the generators."""
    ctx = PrecisionCtx(args.digits)
    if os.path.exists(args.matrix):
        with open(args.matrix) as fh:
            text = fh.read()
        if args.matrix.endswith(".csv"):
            A = matrix_from_csv(text)
        else:
            A = matrix_from_json(text)
    else:
        if args.matrix not in GENERATORS:
            print(f"error: unknown matrix {args.matrix!r}", file=sys.stderr)
            raise SystemExit(EXIT_USAGE)
        A = generate(args.matrix, args.n, args.seed, args.triu_scale, ctx)
    if args.scale_l:
        A = scale_pow2(A, args.scale_l)
    X = round_to(A, ctx)
    series = make_series(args.series, args.m)
    if series.variable_note == VAR_X_SQUARED:
        from .precision import mat_mul
        X = mat_mul(X, X, ctx)
    return X, series, ctx


def _cmd_eval(args) -> int:
    X, series, ctx = _load_argument(args)
    if args.series == "taylor_exp":
        rep = ps_mixed_exp(X, args.m, ctx, args.fix_params, args.delta)
    else:
        rep = ps_mixed_general(X, series, ctx, args.delta)
    lattice = _parse_lattice(args.lattice)
    if lattice:
        rep.diagnostics["snapped_digits"] = list(
            snap_to_lattice(rep.plan, lattice).level_digits)
    if args.format == "csv":
        _emit(args, matrix_to_csv(rep.result) + "\n" + rep.to_json())
    else:
        _emit(args, json.dumps({
            "matrix": json.loads(matrix_to_json(rep.result)),
            "report": json.loads(rep.to_json()),
        }, indent=2))
    return EXIT_OK


def _cmd_plan(args) -> int:
    X, series, ctx = _load_argument(args)
    plan = plan_only(X, series, ctx, args.delta, args.fix_params)
    lattice = _parse_lattice(args.lattice)
    if lattice:
        plan = snap_to_lattice(plan, lattice)
    cr, sav = cost_ratio(plan)
    out = plan.to_dict()
    out["cost_ratio"] = cr
    out["savings"] = sav
    _emit(args, json.dumps(out, indent=2))
    return EXIT_OK


def _cmd_compare(args) -> int:
    X, series, ctx = _load_argument(args)
    if args.series == "taylor_exp":
        mixed = ps_mixed_exp(X, args.m, ctx, args.fix_params, args.delta)
    else:
        mixed = ps_mixed_general(X, series, ctx, args.delta)
    fixed = ps_fixed(X, series, ctx)
    ref = reference_eval(X, series, ctx)
    rec = ComparisonRecord(
        matrix_id=args.matrix, seed=args.seed,
        eps_mixed=relative_error(mixed.result, ref),
        eps_fixed=relative_error(fixed.result, ref),
        rnu=float(mixed.plan.r * X.n_rows) * 10.0 ** (-args.digits),
        savings=mixed.savings, plan=mixed.plan.to_dict())
    _emit(args, json.dumps(rec.to_dict(), indent=2))
    return EXIT_OK


def _cmd_table1(args) -> int:
    try:
        digits_list = [int(x) for x in args.digits_list.split(",")]
        m_list = [int(x) for x in args.m_list.split(",")] \
            if args.m_list else None
    except ValueError:
        print("error: malformed digits/m list", file=sys.stderr)
        return EXIT_USAGE
    if os.path.exists(args.matrix) or args.matrix not in GENERATORS:
        print("error: table1 needs a named generator", file=sys.stderr)
        return EXIT_USAGE
    cfg = ExperimentConfig(
        matrix=args.matrix, n=args.n, seed=args.seed,
        triu_scale=args.triu_scale, scale_l=args.scale_l,
        family=args.series, m=args.m, digits=digits_list[0],
        delta=args.delta, fix_params=args.fix_params,
        lattice=_parse_lattice(args.lattice))
    rows = run_table1(cfg, digits_list, m_list)
    if args.format == "csv":
        _emit(args, table_to_csv(rows))
    else:
        _emit(args, json.dumps(rows, indent=2))
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .acceptance import run_all
    results = run_all(verbose=True)
    return EXIT_OK if all(r.passed for r in results) else EXIT_ACCEPTANCE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mpps",
        description="Mixed-precision Paterson-Stockmeyer evaluation")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate the polynomial; print the "
                       "result matrix and the evaluation report")
    _add_common(p)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("plan", help="run only the precision planner")
    _add_common(p)
    p.set_defaults(fn=_cmd_plan)

    p = sub.add_parser("compare", help="mixed vs fixed vs 2x-digit "
                       "reference")
    _add_common(p)
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("table1", help="planner schedules over a list of "
                       "working precisions")
    _add_common(p)
    p.add_argument("--digits-list", default="32,64,128,256")
    p.add_argument("--m-list", default=None,
                   help="per-precision approximant degrees")
    p.set_defaults(fn=_cmd_table1)

    p = sub.add_parser("verify", help="run the self-verification suite")
    p.set_defaults(fn=_cmd_verify)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit as e:
        return int(e.code or 0)
    except BoundInvalidError as e:
        print(f"numerical precondition failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ArithmeticError, OverflowError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
