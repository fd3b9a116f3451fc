"""Command-line interface: ``qtwist <command> [options]``.

Exit codes: 0 success, 1 a verification check failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import mq2, qplane
from .cg import cg_table
from .errors import QTwistError
from .hseries import session
from .reps import GENERATORS, SpinLabel, as_spin, rep_tensor_coproduct, rep_word, rmatrix_rep
from .twist import standard_twist_rep
from .verify import run_suite

MAX_SPIN_TWO_J = 12   # spins above 6 are outside the tested range


class UsageError(Exception):
    pass


def _spin(text: str) -> int:
    try:
        s = as_spin(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid spin {text!r}: {exc}") from None
    if s.two_j > MAX_SPIN_TWO_J:
        raise UsageError(f"spin {text} is out of range (at most {MAX_SPIN_TWO_J // 2})")
    return s.two_j


def _positive_spin(text: str) -> int:
    two_j = _spin(text)
    if two_j == 0:
        raise UsageError("spin 0 has no nontrivial representation here; use j >= 1/2")
    return two_j


def _load_json(text: str):
    """Inline JSON or ``@path``."""
    try:
        if text.startswith("@"):
            return json.loads(Path(text[1:]).read_text())
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {text[:40]!r}: {exc}") from None


def _emit(obj, args) -> None:
    text = json.dumps(obj, indent=2)
    if args.json_out:
        Path(args.json_out).write_text(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# commands

def cmd_cg(args) -> int:
    table = cg_table(SpinLabel(_positive_spin(args.j1)), SpinLabel(_positive_spin(args.j2)),
                     deformed=not args.classical)
    if args.csv:
        text = table.to_csv()
        if args.json_out:
            Path(args.json_out).write_text(text)
        else:
            sys.stdout.write(text)
        return 0
    _emit(table.to_json(), args)
    return 0


def cmd_repr(args) -> int:
    j = SpinLabel(_positive_spin(args.j))
    if args.rmatrix is not None:
        mat = rmatrix_rep(j, SpinLabel(_positive_spin(args.rmatrix)))
    elif args.tensor is not None:
        if args.word not in GENERATORS:
            raise UsageError("--tensor needs a single generator E, F or H")
        mat = rep_tensor_coproduct(args.word, j, SpinLabel(_positive_spin(args.tensor)),
                                   deformed=not args.classical)
    else:
        if not args.word or any(ch not in GENERATORS for ch in args.word):
            raise UsageError(f"word must consist of {', '.join(GENERATORS)}")
        mat = rep_word(args.word, j, deformed=not args.classical)
    _emit(mat.to_json(), args)
    return 0


def cmd_twist(args) -> int:
    rep = standard_twist_rep(SpinLabel(_positive_spin(args.j1)), SpinLabel(_positive_spin(args.j2)),
                             inverse=args.inverse)
    _emit(rep.matrix.to_json(), args)
    return 0


def cmd_star(args) -> int:
    left, right = _load_json(args.left), _load_json(args.right)
    try:
        if args.space == "plane":
            p, r = qplane.plane_from_json(left), qplane.plane_from_json(right)
            result = qplane.star_plane(p, r)
        else:
            product = mq2.star_euclid if args.space == "mq2" else mq2.star_minkowski
            p, r = mq2.mq2_from_json(left), mq2.mq2_from_json(right)
            result = product(p, r)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed polynomial: {exc}") from None
    _emit(result.to_json(), args)
    return 0


def cmd_relations(args) -> int:
    space = "euclid" if args.space == "mq2" else args.space
    if space == "plane":
        x, y = qplane.PlanePoly.x(), qplane.PlanePoly.y()
        report = {"space": "plane", "xy": qplane.star_plane(x, y).to_json(),
                  "yx": qplane.star_plane(y, x).to_json()}
    else:
        report = mq2.relations_report(space)
    _emit(report, args)
    return 0


def cmd_verify(args) -> int:
    if args.order < 2:
        warnings.warn("order 1 only sees the classical limit; deformation checks are vacuous")
        print("error: verify needs --order >= 2", file=sys.stderr)
        return 2
    max_two_j = _positive_spin(args.max_spin)
    results = run_suite(args.space, max_two_j, seed=args.seed, tol=args.tol, workers=args.workers)
    for res in results:
        print(res.row())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    if args.json_out:
        Path(args.json_out).write_text(json.dumps(
            {"space": args.space, "order": args.order, "tol": args.tol, "seed": args.seed,
             "max_two_j": max_two_j, "checks": [r.to_json() for r in results]}, indent=2) + "\n")
    return 1 if failed else 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, default=8, help="number of hbar coefficients (default 8)")
    common.add_argument("--tol", type=float, default=1e-9, help="coefficient tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised inputs")
    common.add_argument("--json-out", metavar="PATH", help="write the report to PATH")

    parser = argparse.ArgumentParser(prog="qtwist", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cg", parents=[common], help="Clebsch-Gordan table")
    p.add_argument("j1")
    p.add_argument("j2")
    p.add_argument("--classical", action="store_true")
    p.add_argument("--csv", action="store_true", help="CSV instead of JSON")
    p.set_defaults(func=cmd_cg)

    p = sub.add_parser("repr", parents=[common], help="representation matrices")
    p.add_argument("j")
    p.add_argument("word", nargs="?", default="E", help="generator word, e.g. EF (default E)")
    p.add_argument("--classical", action="store_true")
    p.add_argument("--tensor", metavar="J2", help="coproduct of the generator on V^j x V^J2")
    p.add_argument("--rmatrix", metavar="J2", help="R-matrix on V^j x V^J2")
    p.set_defaults(func=cmd_repr)

    p = sub.add_parser("twist", parents=[common], help="standard twist matrix")
    p.add_argument("j1")
    p.add_argument("j2")
    p.add_argument("--inverse", action="store_true")
    p.set_defaults(func=cmd_twist)

    p = sub.add_parser("star", parents=[common], help="star product of two polynomials")
    p.add_argument("left", help="JSON polynomial or @file")
    p.add_argument("right", help="JSON polynomial or @file")
    p.add_argument("--space", choices=("plane", "mq2", "minkowski"), default="plane")
    p.set_defaults(func=cmd_star)

    p = sub.add_parser("relations", parents=[common], help="generator commutation relations")
    p.add_argument("--space", choices=("plane", "mq2", "minkowski"), default="minkowski")
    p.set_defaults(func=cmd_relations)

    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("--space", choices=("plane", "mq2", "minkowski"), default="plane")
    p.add_argument("--max-spin", default="3", help="largest spin in the suite (default 3)")
    p.add_argument("--workers", type=int, default=4)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.order < 1 or args.tol <= 0:
        print("error: --order must be >= 1 and --tol > 0", file=sys.stderr)
        return 2
    try:
        with session(order=args.order, tol=args.tol):
            return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QTwistError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
