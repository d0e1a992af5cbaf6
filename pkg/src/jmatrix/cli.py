"""Command-line entry point.

Subcommands: ``tridiag`` (generic construction), ``morse`` and ``lame``
(the two pipelines), ``families`` (family registry queries), ``quad``
(Gauss rules), ``verify`` (acceptance suites).  Reports are JSON by
default with fixed field order, floats as shortest round-trip decimals,
and rationals as "p/q" strings, so identical inputs give byte-identical
output.  Exit status: 0 on success, 1 on usage errors, 2 on internal
consistency failures (including failed verify suites).
"""

from __future__ import annotations

import argparse
import json
import numbers
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__, jacspec, lame, morse, opfamilies, verify
from .errors import InternalConsistencyError, JMatrixError
from .opfamilies import Family
from .polycore import (
    Mode,
    ModeError,
    compose,
    derivative_op,
    format_scalar,
    parse_polynomial,
    q_derivative_op,
    second_derivative_op,
)
from .tdop import tridiagonalize, validate_td

DEFAULT_TOLERANCES = {"block_tol": 1e-12, "quad_rtol": 1e-10, "residual_tol": 1e-9}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 instead of argparse's default 2
        raise _UsageError(message)


def _jsonable(value):
    """Normalize scalars recursively: Fractions to "p/q", numpy to builtins."""
    if isinstance(value, Fraction):
        return format_scalar(value)
    if isinstance(value, (bool, type(None), str)):
        return value
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, numbers.Real):
        return float(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return str(value)


def _emit(report: dict, args, csv_rows=None) -> None:
    out = sys.stdout if args.output is None else open(args.output, "w")
    try:
        if args.out == "json":
            json.dump(_jsonable(report), out, indent=2)
            out.write("\n")
        else:
            if csv_rows is None:
                raise _UsageError("csv output is not defined for this command/flags")
            for row in csv_rows:
                out.write(",".join(format_scalar(v) if not isinstance(v, str) else v for v in row))
                out.write("\n")
    finally:
        if out is not sys.stdout:
            out.close()


def _base_report(args, command: str, inputs: dict) -> dict:
    return {
        "schema": "jmatrix/1",
        "version": __version__,
        "command": command,
        "mode": args.mode,
        "tolerances": {
            "block_tol": args.block_tol,
            "quad_rtol": args.quad_rtol,
            "residual_tol": args.residual_tol,
        },
        "inputs": inputs,
        "results": {},
    }


def _parse_b(text: str, mode: str):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        if mode == "exact":
            raise _UsageError(f"exact mode needs a rational b, got {text!r}")
        return float(text)


def _cmd_tridiag(args) -> int:
    mode = Mode.EXACT if args.mode == "exact" else Mode.FLOAT
    A = parse_polynomial(args.A, mode)
    B = parse_polynomial(args.B, mode)
    C = parse_polynomial(args.C, mode)
    if args.q is not None:
        S = q_derivative_op(Fraction(args.q) if mode is Mode.EXACT else float(Fraction(args.q)))
        T = compose(S, S)
    else:
        S, T = derivative_op(), second_derivative_op()
    op = validate_td(A, B, C, S, T, relaxed=args.relaxed)
    tri = tridiagonalize(op, args.n)
    report = _base_report(
        args,
        "tridiag",
        {"A": args.A, "B": args.B, "C": args.C, "q": args.q, "n": args.n, "relaxed": args.relaxed},
    )
    report["results"] = tri.to_json_dict()
    _emit(report, args)
    return 0


def _cmd_morse(args) -> int:
    if args.mode == "exact":
        model = morse.build_morse_model(_parse_b(args.b, "exact"))
    else:
        model = morse.build_morse_model(float(_parse_b(args.b, "float")))
    report = _base_report(args, "morse", {"b": args.b})
    report["results"]["model"] = {"b": model.b, "N": model.N}
    csv_rows = None
    if args.levels:
        spectrum = morse.bound_states(model)
        report["results"]["bound_states"] = spectrum.to_json_dict()
        report["results"]["bound_states"]["closed_form"] = morse.bound_state_energies(model)
        csv_rows = [(v,) for v in spectrum.eigenvalues]
    if args.tridiag is not None:
        td = morse.schrodinger_tridiag(model, args.tridiag)
        report["results"]["tridiag"] = {
            "a": list(td.a),
            "diag": list(td.diag),
            "split_index": td.split_index,
        }
    if args.identity is not None:
        r = morse.expansion_identity(model, args.identity)
        report["results"]["expansion_identity"] = {
            "level": args.identity,
            "C": r.C,
            "max_residual": r.max_residual,
            "exact": r.exact,
        }
    if args.parseval is not None:
        n1, n2 = args.parseval
        value = morse.parseval_check(model, n1, n2, rtol=args.quad_rtol)
        report["results"]["parseval"] = {
            "n": n1,
            "m": n2,
            "value": value,
            "delta_error": abs(value - (1.0 if n1 == n2 else 0.0)),
        }
    if args.residual is not None:
        grid = morse.DEFAULT_SAMPLE_GRID
        if args.grid is not None:
            grid = tuple(float(Fraction(tok)) for tok in args.grid.split(","))
        worst = max(morse.action_residual(model, k, samples=grid) for k in range(args.residual + 1))
        report["results"]["action_residual"] = {
            "n_max": args.residual,
            "grid": list(grid),
            "max_residual": worst,
            "within_tolerance": worst <= args.residual_tol,
        }
    _emit(report, args, csv_rows)
    return 0


def _cmd_lame(args) -> int:
    parts = args.e.split(",")
    if len(parts) != 3:
        raise _UsageError("--e needs three comma-separated branch values")
    if args.mode == "exact":
        es = [Fraction(p) for p in parts]
        m = Fraction(args.m)
    else:
        es = [float(Fraction(p)) for p in parts]
        m = float(Fraction(args.m))
    model = lame.build_lame_model(*es, m)
    report = _base_report(args, "lame", {"e": args.e, "m": args.m})
    report["results"]["model"] = {
        "e": list(model.e),
        "m": model.m,
        "a_affine": model.a_affine,
        "b_affine": model.b_affine,
        "alpha": model.alpha,
    }
    csv_rows = None
    if args.spectrum:
        spec = lame.even_spectrum(model)
        report["results"]["even_spectrum"] = {
            "k": spec.k,
            "matrix": [list(row) for row in spec.matrix],
            "eigenvalues": list(spec.eigenvalues),
            "root_eigenvalues": list(spec.root_eigenvalues),
            "pcoeffs": spec.pcoeffs,
            "ode_residuals": [
                lame.even_eigenfunction_residual(spec, model, i) for i in range(spec.k + 1)
            ],
        }
        csv_rows = [(v,) for v in spec.eigenvalues]
    if args.residuals is not None:
        rows = []
        for n in range(args.residuals + 1):
            res = lame.tridiag_residual(model, n)
            rows.append({"n": n, "residual_coeffs": [format_scalar(c) for c in res.coeffs]})
        report["results"]["tridiag_residuals"] = rows
    if args.orthonormal is not None:
        form = lame.orthonormal_form(model, args.orthonormal)
        report["results"]["orthonormal_form"] = {
            "a": list(form.a),
            "diag": list(form.diag),
            "alpha_n": list(form.alpha_n),
            "first_row_doubled": form.first_row_doubled,
        }
    if args.diagnostic is not None:
        diag = lame.selfadjoint_diagnostic(model, args.diagnostic)
        report["results"]["selfadjoint_diagnostic"] = {
            "heuristic": True,
            "sign": diag.report.sign,
            "strictly_bounded": diag.report.strictly_bounded,
            "fitted_leading": list(diag.report.leading),
            "predicted_leading": list(diag.predicted_leading),
        }
    _emit(report, args, csv_rows)
    return 0


def _cmd_families(args) -> int:
    fam = Family.parse(args.family)
    report = _base_report(args, "families", {"family": args.family, "n": args.n})
    report["results"]["family"] = fam.spec_string()
    if args.recurrence:
        rows = []
        for n in range(args.n + 1):
            u, v, w = opfamilies.recurrence_coeffs(fam, n)
            rows.append({"n": n, "u": u, "v": v, "w": w})
        report["results"]["recurrence"] = rows
    if args.eval is not None:
        x = Fraction(args.eval) if args.mode == "exact" else float(Fraction(args.eval))
        report["results"]["values"] = [
            {"n": n, "value": opfamilies.eval_family(fam, n, x)} for n in range(args.n + 1)
        ]
    if args.bochner:
        samples = [-0.9, -0.3, 0.4, 1.7]
        report["results"]["ode_residuals"] = [
            {"n": n, "max_residual": float(opfamilies.bochner_residual(fam, n, samples))}
            for n in range(args.n + 1)
        ]
    if args.asc:
        rows = []
        for n in range(args.n + 1):
            G, a, b, c = opfamilies.asc_relation(fam, n)
            rows.append({"n": n, "G": [format_scalar(v) for v in G.coeffs], "A": a, "B": b, "C": c})
        report["results"]["structure_relation"] = rows
    _emit(report, args)
    return 0


def _cmd_quad(args) -> int:
    fam = Family.parse(args.family)
    J, mass = opfamilies.family_jacobi_operator(fam)
    rule = jacspec.golub_welsch(J, args.n, mass)
    report = _base_report(args, "quad", {"family": args.family, "n": args.n})
    report["results"] = {
        "total_mass": rule.total_mass,
        "nodes": list(rule.nodes),
        "weights": list(rule.weights),
    }
    csv_rows = [("node", "weight")] + [(x, w) for x, w in zip(rule.nodes, rule.weights)]
    _emit(report, args, csv_rows)
    return 0


def _cmd_verify(args) -> int:
    names = args.suite or ["all"]
    try:
        results = verify.run_suites(names)
    except KeyError as exc:
        raise _UsageError(str(exc)) from None
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:24s}  {r.detail}", file=sys.stderr)
    report = _base_report(args, "verify", {"suite": names})
    report["results"]["criteria"] = [{"name": r.name, "passed": r.passed} for r in results]
    report["results"]["all_passed"] = all(r.passed for r in results)
    _emit(report, args)
    return 0 if all(r.passed for r in results) else 2


def build_parser() -> _Parser:
    parser = _Parser(prog="jmatrix", description="Tridiagonal representations of second-order operators")
    parser.add_argument("--mode", choices=("exact", "float"), default=None,
                        help="scalar mode (env JMATRIX_MODE overrides the default 'exact')")
    parser.add_argument("--out", choices=("json", "csv"), default="json")
    parser.add_argument("--output", default=None, help="write the report to this path instead of stdout")
    parser.add_argument("--block-tol", type=float, default=DEFAULT_TOLERANCES["block_tol"])
    parser.add_argument("--quad-rtol", type=float, default=DEFAULT_TOLERANCES["quad_rtol"])
    parser.add_argument("--residual-tol", type=float, default=DEFAULT_TOLERANCES["residual_tol"])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tridiag", help="canonical tridiagonalization of a TD-operator")
    p.add_argument("--A", required=True, help="coefficients, ascending, e.g. '0,0,0,1' for x^3")
    p.add_argument("--B", required=True)
    p.add_argument("--C", required=True)
    p.add_argument("--q", default=None, help="use q-difference lowering operators with this q")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--relaxed", action="store_true", help="admit deg(A) < 3 and deg(B) < 2")
    p.set_defaults(func=_cmd_tridiag)

    p = sub.add_parser("morse", help="exponential-well pipeline")
    p.add_argument("--b", required=True)
    p.add_argument("--levels", action="store_true", help="bound-state eigenvalues")
    p.add_argument("--tridiag", type=int, default=None, metavar="N", help="band coefficients to index N")
    p.add_argument("--identity", type=int, default=None, metavar="M", help="expansion identity at level M")
    p.add_argument("--parseval", type=int, nargs=2, default=None, metavar=("N", "M"))
    p.add_argument("--residual", type=int, default=None, metavar="N", help="max action residual for n <= N")
    p.add_argument("--grid", default=None, help="comma-separated sample points for --residual")
    p.set_defaults(func=_cmd_morse)

    p = sub.add_parser("lame", help="cubic-coefficient pipeline")
    p.add_argument("--e", required=True, help="three branch values, e.g. '3,-1,-2'")
    p.add_argument("--m", required=True)
    p.add_argument("--spectrum", action="store_true", help="even-case finite spectrum")
    p.add_argument("--residuals", type=int, default=None, metavar="N", help="band residual polynomials, n <= N")
    p.add_argument("--orthonormal", type=int, default=None, metavar="N")
    p.add_argument("--diagnostic", type=int, default=None, metavar="N")
    p.set_defaults(func=_cmd_lame)

    p = sub.add_parser("families", help="classical family registry")
    p.add_argument("--family", required=True, help="e.g. jacobi:-0.5,-0.5 laguerre:0.5 dualhahn:0.5,0,1 cdh:2.75,0.25,1.75")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--recurrence", action="store_true")
    p.add_argument("--eval", default=None, metavar="X")
    p.add_argument("--bochner", action="store_true")
    p.add_argument("--asc", action="store_true")
    p.set_defaults(func=_cmd_families)

    p = sub.add_parser("quad", help="Gauss rule from a family recurrence")
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_quad)

    p = sub.add_parser("verify", help="run acceptance suites")
    p.add_argument("--suite", nargs="*", default=None,
                   help=f"suites to run; choices: all, {', '.join(verify.SUITES)}")
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.mode is None:
            args.mode = os.environ.get("JMATRIX_MODE", "exact").lower()
        if args.mode not in ("exact", "float"):
            raise _UsageError(f"JMATRIX_MODE must be exact or float, got {args.mode!r}")
        for tol in ("block_tol", "quad_rtol", "residual_tol"):
            if getattr(args, tol) <= 0:
                raise _UsageError(f"--{tol.replace('_', '-')} must be positive")
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ModeError, JMatrixError, ValueError) as exc:
        if isinstance(exc, InternalConsistencyError):
            print(f"internal consistency failure: {exc}", file=sys.stderr)
            return 2
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
