"""Command-line surface: JSON in, JSON out, deterministic given seeds.

Exit codes: 0 success, 1 verification failure (a false analytic verdict
from ``check``, or any failed trial from ``verify``), 2 input or domain
errors (including malformed JSON, reported as a JSON error object on
stderr).  ``verify`` additionally exits 2 when any trial is singular.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .brackets import PQParams, bracket_pq, bracket_q
from .errors import QuadratureError, SingularRatioError
from .membership import ClassParams, ExtremalWeights, bernardi, check_membership, convolve, extremal_function
from .operator import OperatorParams, apply_operator
from .series import ANALYTIC, CO_ANALYTIC, DiskGrid, read_series
from .verify import SUITE_NAMES, SuiteConfig, run_suites, suite_exit_code, write_reports

__all__ = ["main", "entrypoint"]


def _color_enabled() -> bool:
    return sys.stdout.isatty() and not os.environ.get("NO_COLOR")


def _verdict_text(ok: bool) -> str:
    label = "PASS" if ok else "FAIL"
    if _color_enabled():
        return f"\x1b[32m{label}\x1b[0m" if ok else f"\x1b[31m{label}\x1b[0m"
    return label


def _dump(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _load_json(path: str):
    with open(path, encoding="utf-8") as fp:
        return json.load(fp)


def _parse_grid(text: str, r_max: float) -> DiskGrid:
    try:
        radii_text, angles_text = text.lower().split("x")
        return DiskGrid.uniform(int(radii_text), int(angles_text), r_max)
    except ValueError as exc:
        raise ValueError(f"grid must look like '64x256', got {text!r}") from exc


def _cmd_bracket(args) -> int:
    if args.p is not None:
        value = bracket_pq(args.x, PQParams(args.p, args.q))
    else:
        value = bracket_q(args.x, args.q)
    if args.format == "json":
        _emit(_dump({"p": args.p, "q": args.q, "x": args.x, "value": value}), args.out)
    else:
        # text output is for humans; JSON carries the exact binary64
        _emit(f"{value:.12g}", args.out)
    return 0


def _cmd_apply(args) -> int:
    params = OperatorParams.from_dict(_load_json(args.params))
    f = read_series(args.inputs[0])
    _emit(_dump(apply_operator(f, params).to_dict()), args.out)
    return 0


def _cmd_check(args) -> int:
    cp = ClassParams.from_dict(_load_json(args.class_path))
    f = read_series(args.inputs[0])
    grid = _parse_grid(args.grid, args.rmax)
    report = check_membership(f, cp, grid)
    if args.format == "json":
        _emit(_dump(report.to_dict()), args.out)
    else:
        lines = [
            f"margin             {report.margin!r}",
            f"coefficient_sum    {report.coefficient_sum!r}",
            f"bound              {report.bound!r}",
            f"min_re             {report.min_re!r} at z={report.argmin_z!r}",
            f"sense_gap_min      {report.sense_gap_min!r}",
            f"sufficient_verdict {_verdict_text(report.sufficient_verdict)}",
            f"analytic_verdict   {_verdict_text(report.analytic_verdict)}",
            f"degenerate         {'yes' if report.degenerate else 'no'}",
        ]
        _emit("\n".join(lines), args.out)
    return 0 if report.analytic_verdict else 1


def _cmd_extremal(args) -> int:
    cp = ClassParams.from_dict(_load_json(args.class_path))
    mu = args.mu
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"--mu must lie in [0, 1], got {mu}")
    if args.part == ANALYTIC and args.kappa == cp.ell:
        # all analytic weight at kappa = ell is the bare z**ell extreme point
        weights = ExtremalWeights(1.0)
    elif args.part == ANALYTIC:
        weights = ExtremalWeights(1.0 - mu, {args.kappa: mu}, {})
    else:
        weights = ExtremalWeights(1.0 - mu, {}, {args.kappa: mu})
    f = extremal_function(weights, cp, truncation=args.truncation)
    _emit(_dump(f.to_dict()), args.out)
    return 0


def _cmd_convolve(args) -> int:
    f = read_series(args.inputs[0])
    m = read_series(args.inputs[1])
    _emit(_dump(convolve(f, m).to_dict()), args.out)
    return 0


def _cmd_bernardi(args) -> int:
    f = read_series(args.inputs[0])
    _emit(_dump(bernardi(f, args.u).to_dict()), args.out)
    return 0


def _cmd_verify(args) -> int:
    cp = ClassParams.from_dict(_load_json(args.class_path))
    suites = tuple(s for s in args.suites.split(",") if s)
    truncation = args.truncation if args.truncation is not None else cp.ell + 9
    config = SuiteConfig(
        cp=cp,
        trials=args.trials,
        truncation=truncation,
        grid=_parse_grid(args.grid, args.rmax),
        seed=args.seed,
        suites=suites,
    )
    reports = run_suites(config)
    paths = write_reports(reports, args.out or ".")
    for (suite, report), path in zip(reports.items(), paths):
        counts = report.counts
        print(
            f"suite={suite} trials={config.trials} pass={counts['pass']} "
            f"fail={counts['fail']} singular={counts['singular']} report={path}"
        )
    return suite_exit_code(reports)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pqharmonic",
        description="Deformed coefficient operators on harmonic multivalent series: "
        "apply, check membership, build extremals, convolve, transform and verify.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_bracket = sub.add_parser("bracket", help="evaluate a deformed bracket")
    p_bracket.add_argument("--p", type=float, default=None, help="first deformation parameter; omit for the one-parameter bracket")
    p_bracket.add_argument("--q", type=float, required=True, help="second deformation parameter")
    p_bracket.add_argument("--x", type=float, required=True, help="bracket argument, x >= 0")
    p_bracket.add_argument("--format", choices=("json", "text"), default="text")
    p_bracket.add_argument("--out", default=None, help="write output here instead of stdout")
    p_bracket.set_defaults(func=_cmd_bracket)

    p_apply = sub.add_parser("apply", help="apply the multiplier operator to a series")
    p_apply.add_argument("--params", required=True, help="operator parameter JSON file")
    p_apply.add_argument("--in", dest="inputs", nargs=1, required=True, metavar="SERIES")
    p_apply.add_argument("--out", default=None)
    p_apply.set_defaults(func=_cmd_apply)

    p_check = sub.add_parser("check", help="run both membership tests on a series")
    p_check.add_argument("--class", dest="class_path", required=True, help="class parameter JSON file")
    p_check.add_argument("--in", dest="inputs", nargs=1, required=True, metavar="SERIES")
    p_check.add_argument("--grid", default="64x256", help="radii x angles, e.g. 64x256")
    p_check.add_argument("--rmax", type=float, default=0.995)
    p_check.add_argument("--format", choices=("json", "text"), default="json")
    p_check.add_argument("--out", default=None)
    p_check.set_defaults(func=_cmd_check)

    p_extremal = sub.add_parser("extremal", help="build a sharpness extremal function")
    p_extremal.add_argument("--class", dest="class_path", required=True)
    p_extremal.add_argument("--kappa", type=int, required=True, help="weighted coefficient index")
    p_extremal.add_argument("--part", choices=(ANALYTIC, CO_ANALYTIC), default=ANALYTIC)
    p_extremal.add_argument("--mu", type=float, default=1.0, help="weight on the chosen index; the rest goes to z**ell")
    p_extremal.add_argument("--truncation", type=int, default=None)
    p_extremal.add_argument("--out", default=None)
    p_extremal.set_defaults(func=_cmd_extremal)

    p_convolve = sub.add_parser("convolve", help="term-wise coefficient product of two series")
    p_convolve.add_argument("--in", dest="inputs", nargs=2, required=True, metavar=("SERIES", "SERIES2"))
    p_convolve.add_argument("--out", default=None)
    p_convolve.set_defaults(func=_cmd_convolve)

    p_bernardi = sub.add_parser("bernardi", help="apply the integral-transform coefficient map")
    p_bernardi.add_argument("--u", type=float, required=True, help="transform parameter, u > -1")
    p_bernardi.add_argument("--in", dest="inputs", nargs=1, required=True, metavar="SERIES")
    p_bernardi.add_argument("--out", default=None)
    p_bernardi.set_defaults(func=_cmd_bernardi)

    p_verify = sub.add_parser("verify", help="run seeded verification suites")
    p_verify.add_argument("--class", dest="class_path", required=True)
    p_verify.add_argument("--trials", type=int, default=100)
    p_verify.add_argument("--truncation", type=int, default=None, help="sample truncation order (default ell + 9)")
    p_verify.add_argument("--grid", default="64x256")
    p_verify.add_argument("--rmax", type=float, default=0.995)
    p_verify.add_argument("--seed", type=int, default=42)
    p_verify.add_argument("--suites", default=",".join(SUITE_NAMES), help="comma-separated subset of " + ",".join(SUITE_NAMES))
    p_verify.add_argument("--out", default=None, help="directory for report files (default .)")
    p_verify.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, json.JSONDecodeError, SingularRatioError, QuadratureError, OSError) as exc:
        sys.stderr.write(
            _dump({"error": {"type": type(exc).__name__, "message": str(exc)}}) + "\n"
        )
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
