"""Command-line interface.

Exit codes: 0 success (valid / certified / accepted / no violations),
2 a negative answer with a witness, 1 input, parameter or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .characterization import auto_params, certify_cube_candidate, digest
from .cubes import CubeSystem, build_cube_system, verify_cube_system
from .exceptions import DyadicError, MetricViolation
from .io import dumps, load_matrix, load_subset
from .metric import doubling_report, validate_metric
from .nets import DyadicPointSystem, NetParams, build_plain_points, default_levels, verify_point_system
from .order import ParentOrder, build_order, verify_order
from .plumpness import DPlumpParams, PlumpParams, check_dplump, check_plump

log = logging.getLogger("dyadic_cubes")

OK, ERROR, NEGATIVE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse would exit with 2, which is reserved for negative answers
    def error(self, message):
        raise UsageError(message)


def _number(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _space(args):
    return validate_metric(load_matrix(args.input))


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n for n in missing))


def cmd_validate(args):
    raw = load_matrix(args.input)
    try:
        space = validate_metric(raw)
    except MetricViolation as exc:
        return NEGATIVE, {"valid": False, "n": int(raw.shape[0]), "violation": exc.to_dict()}
    return OK, {"valid": True, "n": space.n}


def cmd_doubling(args):
    space = _space(args)
    exact = True if args.exact else (False if args.greedy else None)
    return OK, doubling_report(space, exact=exact)


def cmd_plump_check(args):
    space = _space(args)
    _need(args, "subset")
    subset = load_subset(args.subset, space.n)
    if args.R is not None or args.b is not None:
        _need(args, "R", "b")
        verdict = check_plump(space, subset, PlumpParams(args.R, args.b))
    else:
        _need(args, "delta", "m", "b0", "B0")
        verdict = check_dplump(space, subset, DPlumpParams(args.delta, args.m, args.b0, args.B0))
    return (OK if verdict.certified else NEGATIVE), verdict.to_dict()


def _system_payload(space, points, order, cubes, mode_extra=None):
    reports = {
        "points": verify_point_system(space, points),
        "order": verify_order(space, points, order),
        "cubes": verify_cube_system(space, cubes),
    }
    ok = all(r["ok"] for r in reports.values())
    body = {
        "ok": ok,
        "mode": {"verification": reports["cubes"]["mode"], "resolution": cubes.resolution,
                 **(mode_extra or {})},
        "n": space.n,
        "points": points.to_dict(),
        "order": order.to_dict(),
        "cubes": cubes.to_dict(),
        "reports": reports,
    }
    body["digest"] = digest(body)
    return ok, body


def cmd_build_system(args):
    space = _space(args)
    lo, hi = default_levels(space, args.delta, args.c0, args.C0)
    params = NetParams(args.delta, args.c0, args.C0,
                       lo if args.kmin is None else args.kmin,
                       hi if args.kmax is None else args.kmax)
    params.validate(cube_hypothesis=True)
    points = build_plain_points(space, params)
    order = build_order(space, points)
    cubes = build_cube_system(space, points, order, require_full=args.kmax is None)
    ok, body = _system_payload(space, points, order, cubes)
    return (OK if ok else NEGATIVE), body


def cmd_certify_cube(args):
    space = _space(args)
    _need(args, "subset")
    subset = load_subset(args.subset, space.n)
    if not subset:
        raise UsageError("subset is empty")
    if args.auto:
        params = auto_params(space, subset, args.delta if args.delta is not None else 1 / 16)
    else:
        _need(args, "delta", "m", "b0", "B0")
        params = DPlumpParams(args.delta, args.m, args.b0, args.B0)
    cert = certify_cube_candidate(space, subset, params, k_max=args.kmax)
    body = cert.to_dict()
    body["mode"] = {"params": "auto" if args.auto else "explicit",
                    "resolution": None if cert.cubes is None else cert.cubes.resolution}
    return (OK if cert.accepted else NEGATIVE), body


def cmd_verify_system(args):
    space = _space(args)
    _need(args, "system")
    try:
        data = json.loads(Path(args.system).read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.system}: invalid JSON ({exc})") from None
    try:
        points = DyadicPointSystem.from_dict(data["points"], space.n)
        order = ParentOrder.from_dict(data["order"])
        supplied = data.get("cubes", data.get("cube_system"))
        cubes = CubeSystem.from_dict(supplied) if supplied else None
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{args.system}: not a serialized system ({exc})") from None
    if cubes is None:
        cubes = build_cube_system(space, points, order, require_full=False)
    rebuilt = build_cube_system(space, points, order, require_full=False)
    consistent = all(
        [list(map(int, a)) for a in cubes.members[k]] == [list(map(int, a)) for a in rebuilt.members[k]]
        for k in rebuilt.levels) if list(cubes.levels) == list(rebuilt.levels) else False
    ok, body = _system_payload(space, points, order, cubes)
    body["reports"]["consistency"] = {"ok": consistent}
    body["ok"] = ok and consistent
    body["digest"] = digest({k: v for k, v in body.items() if k != "digest"})
    return (OK if body["ok"] else NEGATIVE), body


COMMANDS = {
    "validate": cmd_validate,
    "doubling": cmd_doubling,
    "plump-check": cmd_plump_check,
    "build-system": cmd_build_system,
    "certify-cube": cmd_certify_cube,
    "verify-system": cmd_verify_system,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dyadic-cubes", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("input", help="CSV of coordinates or JSON {'n', 'dist'} matrix")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("-v", "--verbose", action="count", default=0)

    def dplump(p, delta_default=None):
        p.add_argument("--delta", type=_number, default=delta_default)
        p.add_argument("--m", type=int)
        p.add_argument("--b0", type=_number)
        p.add_argument("--B0", type=_number)

    p = sub.add_parser("validate", help="check the metric axioms")
    common(p)

    p = sub.add_parser("doubling", help="doubling constant")
    common(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true")
    g.add_argument("--greedy", action="store_true")

    p = sub.add_parser("plump-check", help="plumpness (--R/--b) or d-plumpness of a subset")
    common(p)
    p.add_argument("--subset")
    dplump(p)
    p.add_argument("--R", type=_number)
    p.add_argument("--b", type=_number)

    p = sub.add_parser("build-system", help="build and verify a cube system")
    common(p)
    p.add_argument("--delta", type=_number, default=1 / 16)
    p.add_argument("--c0", type=_number, default=1.0)
    p.add_argument("--C0", type=_number, default=1.0)
    p.add_argument("--kmin", type=int)
    p.add_argument("--kmax", type=int)

    p = sub.add_parser("certify-cube", help="decide whether a subset is a dyadic cube")
    common(p)
    p.add_argument("--subset")
    dplump(p)
    p.add_argument("--auto", action="store_true", help="search b0, B0 with m = 0")
    p.add_argument("--kmax", type=int)

    p = sub.add_parser("verify-system", help="re-verify a serialized system")
    common(p)
    p.add_argument("--system")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        code, payload = COMMANDS[args.command](args)
    except (UsageError, DyadicError, OSError, ValueError) as exc:
        log.debug("command failed", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return ERROR
    text = dumps(payload)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
