"""Command-line interface.

Exit status: 0 when every check passes, 1 for invalid input (with
diagnostics on stderr), 2 when a proved identity fails on valid data.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import linalg as la
from .algebra_core import (
    AffineSymplecticData,
    ValidationError,
    data_to_json,
    load_data_file,
    validate_data,
)
from .double_lie import GroupElement, bracket_table_json, build_bracket
from .errors import InputError, InternalError
from .families import coframe_at_point, kodaira_data, metric_at_point, threestep_data
from .geometry import (
    curvature,
    flatness_report,
    geodesic_closed_form,
    geodesic_numeric,
    ricci_from_curvature,
    trajectory_csv,
)
from .report import dumps, verify_all

EXAMPLES = ("kodaira", "threestep")


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; status 2 is reserved
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_source(p: argparse.ArgumentParser, *, file_required: bool = False) -> None:
    if file_required:
        p.add_argument("file", help="JSON data file")
    else:
        p.add_argument("file", nargs="?", help="JSON data file")
        p.add_argument("--example", choices=EXAMPLES, help="use a built-in family instead of a file")
        p.add_argument("--n", type=int, default=1, help="kodaira: data dimension is 4n")
        p.add_argument("--a", default="0", help="threestep parameter (exact rational)")
        p.add_argument("--b", default="1", help="threestep parameter (exact rational)")
        p.add_argument("--c", default="0", help="threestep parameter (exact rational)")
    p.add_argument("-o", "--output", help="write to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hypersymp",
        description="Double Lie groups and hypersymplectic structures from affine-symplectic data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    _add_source(sub.add_parser("validate", help="check the defining equations of the data"), file_required=True)
    _add_source(sub.add_parser("build", help="emit the bracket table of the double Lie algebra"))
    _add_source(sub.add_parser("verify-all", help="run the full verification pipeline"))
    _add_source(sub.add_parser("curvature", help="curvature, Ricci and flatness of the neutral metric"))
    _add_source(sub.add_parser("example", help="emit a built-in family as a data file"))

    geo = sub.add_parser("geodesic", help="integrate a geodesic and emit CSV")
    _add_source(geo)
    geo.add_argument("--a0", required=True, help="initial a, comma separated rationals")
    geo.add_argument("--b0", required=True, help="initial b, comma separated rationals")
    geo.add_argument("--t-end", default="10", help="final time")
    geo.add_argument("--step", default="1/1000", help="RK4 step")

    cof = sub.add_parser("coframe", help="left-invariant coframe and metric at a group point")
    _add_source(cof)
    cof.add_argument("--point", required=True, help="(x, x') as 2m comma separated rationals")
    return parser


def _positive_number(text: str, name: str) -> float:
    try:
        value = float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"--{name}: not a number: {text!r}") from exc
    if value <= 0:
        raise InputError(f"--{name} must be positive")
    return value


def load_source(args) -> AffineSymplecticData:
    example = getattr(args, "example", None)
    if example and args.file:
        raise InputError("give either a data file or --example, not both")
    if example == "kodaira":
        return kodaira_data(args.n)
    if example == "threestep":
        return threestep_data(a=args.a, b=args.b, c=args.c)
    if not args.file:
        raise InputError("no input: give a data file or --example")
    return validate_data(*load_data_file(args.file))


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _sized(vec, n: int, name: str) -> la.Vector:
    if len(vec) != n:
        raise InputError(f"{name} must have {n} entries, got {len(vec)}")
    return vec


def curvature_json(data: AffineSymplecticData) -> dict:
    R = curvature(data)
    d = 2 * data.dim
    nonzero = [
        {"i": i, "j": j, "matrix": la.format_matrix(R.operators[i][j])}
        for i in range(d)
        for j in range(i + 1, d)
        if not la.mat_is_zero(R.operators[i][j])
    ]
    return {
        "zero": R.is_zero(),
        "nonzero_operators": nonzero,
        "ricci_zero": la.mat_is_zero(ricci_from_curvature(R)),
        "flatness": flatness_report(data, R).to_json(),
    }


def run(args) -> int:
    cmd = args.command
    if cmd == "validate":
        try:
            data = validate_data(*load_data_file(args.file))
        except ValidationError as exc:
            _emit(dumps(exc.report.to_json()), args.output)
            print("\n".join(exc.report.describe_failures()), file=sys.stderr)
            return 1
        _emit(dumps(data.report.to_json()), args.output)
        return 0

    try:
        data = load_source(args)
    except ValidationError as exc:
        print("\n".join(exc.report.describe_failures()), file=sys.stderr)
        return 1

    if cmd == "example":
        _emit(dumps(data_to_json(data)), args.output)
    elif cmd == "build":
        _emit(dumps(bracket_table_json(build_bracket(data))), args.output)
    elif cmd == "verify-all":
        report = verify_all(data)
        _emit(dumps(report), args.output)
        if report["internal_errors"]:
            print("failed identities: " + ", ".join(report["internal_errors"]), file=sys.stderr)
            return 2
    elif cmd == "curvature":
        _emit(dumps(curvature_json(data)), args.output)
    elif cmd == "geodesic":
        m = data.dim
        a0 = _sized(la.parse_vector(args.a0), m, "--a0")
        b0 = _sized(la.parse_vector(args.b0), m, "--b0")
        geodesic_closed_form(data, a0, b0)
        traj = geodesic_numeric(
            data, a0, b0, _positive_number(args.t_end, "t-end"), _positive_number(args.step, "step")
        )
        _emit(trajectory_csv(traj), args.output)
    elif cmd == "coframe":
        point = _sized(la.parse_vector(args.point), 2 * data.dim, "--point")
        p = GroupElement.from_vector(point)
        out = {
            "point": la.format_vector(point),
            "coframe": la.format_matrix(coframe_at_point(data, p)),
            "metric": la.format_matrix(metric_at_point(data, p)),
        }
        _emit(dumps(out), args.output)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
