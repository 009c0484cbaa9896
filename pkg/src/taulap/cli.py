"""Command-line interface.

Exit codes: 0 success, 1 domain error (bad mathematical input, failed solve),
2 failed validation suite, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from taulap.bell import reciprocal_coefficient, resolvent_coefficient
from taulap.boundary import (
    correlator,
    evaluate_correlator,
    generic_moments,
    lambda_exponent,
)
from taulap.laplacian import free_energy, tau_intersection
from taulap.ring import (
    RingError,
    ZLaurent,
    format_rational,
    render_str,
    render_terms,
    render_z,
)
from taulap.spectral import SpectralError, SpectralModel, solve

USAGE_EXIT = 64
CHECK_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _fraction(value: object) -> Fraction:
    if isinstance(value, bool):
        raise RingError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise RingError(f"bad rational literal {value!r}: {exc}") from exc
    raise RingError(f"cannot interpret {value!r} as a rational number")


def _parse_groups(text: str) -> list[list[Fraction]]:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RingError(f"--groups must be JSON: {exc}") from exc
    if not isinstance(raw, list) or not raw or not all(isinstance(g, list) and g for g in raw):
        raise RingError("--groups must be a nonempty list of nonempty lists")
    return [[_fraction(v) for v in grp] for grp in raw]


def _parse_moments(text: str) -> dict[int, Fraction]:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RingError(f"--moments must be JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise RingError("--moments must be a JSON object of index: value")
    out: dict[int, Fraction] = {}
    for key, value in raw.items():
        try:
            index = int(key)
        except ValueError as exc:
            raise RingError(f"bad moment index {key!r}") from exc
        if index < 0:
            raise RingError(f"bad moment index {key!r}")
        out[index] = _fraction(value)
    return out


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_fg(args: argparse.Namespace) -> int:
    tables: dict[str, dict[str, str]] = {}
    for g in range(2, args.gmax + 1):
        poly = free_energy(g, args.convention)
        tables[f"F{g}"] = dict(render_terms(poly, args.convention, normalized=True))
    if args.format == "json":
        print(json.dumps(tables, indent=2))
        return 0
    for name, table in tables.items():
        print(f"{name}:")
        for mono, value in table.items():
            print(f"  {mono}: {value}")
    return 0


def _cmd_tau(args: argparse.Namespace) -> int:
    print(format_rational(tau_intersection(args.indices)))
    return 0


def _cmd_coeffs(args: argparse.Namespace) -> int:
    build = reciprocal_coefficient if args.family == "S" else resolvent_coefficient
    for m in range(args.mmax + 1):
        print(f"{args.family}_{m} = {render_str(build(m), 'rho')}")
    return 0


def _cmd_correlator(args: argparse.Namespace) -> int:
    obj = correlator(args.genus, args.boundaries)
    rendered = render_z(obj, "rho") if isinstance(obj, ZLaurent) else str(obj)
    print(rendered)
    print(f"coupling power: lambda^{lambda_exponent(args.genus, args.boundaries)}")
    return 0


def _cmd_npoint(args: argparse.Namespace) -> int:
    groups = _parse_groups(args.groups)
    moments = _parse_moments(args.moments) if args.moments else generic_moments()
    coupling = _fraction(args.coupling)
    value = evaluate_correlator(args.genus, groups, coupling, moments)
    print(format_rational(value))
    return 0


def _cmd_model(args: argparse.Namespace) -> int:
    if args.file == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.file, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise SpectralError(f"cannot read model file: {exc}") from exc
    model = SpectralModel.from_json(text)
    solution = solve(model, tol=args.tol)
    moments = solution.moments(args.lmax)
    report = {
        "dimension": model.dimension,
        "coupling": model.coupling,
        "volume": model.volume,
        "levels": len(model.levels),
        "shift": solution.shift,
        "edge": solution.edge,
        "wave_renorm": solution.wave_renorm,
        "mass_shift": solution.mass_shift,
        "moments": {str(l): moments[l] for l in sorted(moments)},
    }
    if args.eval:
        groups = [[float(v) for v in grp] for grp in json.loads(args.eval)]
        report["correlator"] = solution.evaluate_correlator(args.genus, groups)
    if args.format == "json":
        print(json.dumps(report, indent=2))
        return 0
    for key in ("dimension", "coupling", "volume", "levels", "shift", "edge",
                "wave_renorm", "mass_shift"):
        print(f"{key}: {report[key]}")
    for l in sorted(moments):
        print(f"moment[{l}]: {moments[l]:.15g}")
    if "correlator" in report:
        print(f"correlator: {report['correlator']:.15g}")
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    from taulap import recursion, virasoro

    failures: list[str] = []
    if args.suite == "oracle":
        gmax = args.gmax or 5
        for g in range(1, gmax + 1):
            ok = recursion.one_point(g).terms == correlator(g, 1).terms
            print(f"one-point genus {g}: {'ok' if ok else 'MISMATCH'}")
            if not ok:
                failures.append(f"oracle g={g}")
    elif args.suite == "dse1":
        gmax = args.gmax or 4
        for g in range(1, gmax + 1):
            ok = not recursion.one_point_residual(g).terms
            print(f"one-boundary loop equation genus {g}: {'ok' if ok else 'NONZERO'}")
            if not ok:
                failures.append(f"dse1 g={g}")
    elif args.suite == "dseB":
        for g, b in [(0, 3), (0, 4), (1, 2), (1, 3), (2, 2)]:
            ok = recursion.dse_certify(g, b, threads=args.threads)
            print(f"loop equation ({g}, {b}): {'ok' if ok else 'NONZERO'}")
            if not ok:
                failures.append(f"dseB ({g},{b})")
    else:  # virasoro
        gmax = args.gmax or 5
        series = virasoro.stable_series(gmax)
        for n in range(0, 18):
            ok = virasoro.constraint_satisfied(n, series)
            print(f"constraint {n}: {'ok' if ok else 'VIOLATED'}")
            if not ok:
                failures.append(f"virasoro n={n}")
    if failures:
        print(f"FAILED: {', '.join(failures)}", file=sys.stderr)
        return CHECK_EXIT
    print("all checks passed")
    return 0


# ---------------------------------------------------------------------------
# parser


def _indices(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad index list {text!r}") from exc


def build_parser() -> _Parser:
    parser = _Parser(prog="taulap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    fg = sub.add_parser("fg", help="genus generating functions")
    fg.add_argument("--gmax", type=int, default=4)
    fg.add_argument("--convention", choices=("t", "rho", "iz", "eynard"), default="t")
    fg.add_argument("--format", choices=("text", "json"), default="text")
    fg.set_defaults(func=_cmd_fg)

    tau = sub.add_parser("tau", help="intersection number of psi classes")
    tau.add_argument("--indices", type=_indices, required=True,
                     help="comma-separated exponents, e.g. 2,2,2")
    tau.set_defaults(func=_cmd_tau)

    coeffs = sub.add_parser("coeffs", help="auxiliary coefficient families")
    coeffs.add_argument("--family", choices=("S", "R"), required=True)
    coeffs.add_argument("--mmax", type=int, default=6)
    coeffs.set_defaults(func=_cmd_coeffs)

    corr = sub.add_parser("correlator", help="stored correlation function")
    corr.add_argument("--genus", type=int, required=True)
    corr.add_argument("--boundaries", type=int, required=True)
    corr.set_defaults(func=_cmd_correlator)

    npoint = sub.add_parser("npoint", help="evaluate a grouped correlator exactly")
    npoint.add_argument("--genus", type=int, required=True)
    npoint.add_argument("--groups", required=True,
                        help='JSON list of groups, e.g. [["13/10","21/10"],["7/10"]]')
    npoint.add_argument("--moments", default=None,
                        help='JSON object {"0": "5/3", ...}; default generic moments')
    npoint.add_argument("--coupling", default="1/2")
    npoint.set_defaults(func=_cmd_npoint)

    model = sub.add_parser("model", help="solve a spectral model file")
    model.add_argument("--file", required=True, help="JSON model path or - for stdin")
    model.add_argument("--lmax", type=int, default=5)
    model.add_argument("--tol", type=float, default=1e-12)
    model.add_argument("--eval", default=None,
                       help="JSON groups of boundary points to evaluate")
    model.add_argument("--genus", type=int, default=0)
    model.add_argument("--format", choices=("text", "json"), default="text")
    model.set_defaults(func=_cmd_model)

    check = sub.add_parser("check", help="run a validation suite")
    check.add_argument("--suite", choices=("oracle", "dse1", "dseB", "virasoro"),
                       required=True)
    check.add_argument("--gmax", type=int, default=None)
    check.add_argument("--threads", type=int, default=1)
    check.set_defaults(func=_cmd_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "gmax", None) is not None and args.command == "fg" and args.gmax < 2:
        parser.error("--gmax must be at least 2")
    try:
        return args.func(args)
    except (RingError, SpectralError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
