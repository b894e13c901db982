"""Command-line interface.

Subcommands:

* validate FILE   -- parse a document and report structure violations
* info FILE       -- dimension, series, center, coadjoint rank
* lifted FILE     -- moving-frame factors and the lifted invariants
* invariants FILE -- full pipeline: frame, elimination, verification
* verify FILE --expr EXPR -- check one expression against the PDE system
* family NAME ... -- emit a built-in algebra document with its known basis

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 closed-form exponential needed or elimination incomplete.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .algebra import (
    StructureError,
    center,
    derived_series,
    is_nilpotent,
    is_solvable,
    lower_central_series,
    num_invariants,
    rank_coadjoint,
    validate,
)
from .expr import KernelError, expr_str
from .families import (
    make_g6_38,
    make_jordan,
    make_s1,
    make_s2,
    make_s3,
    make_s4,
    make_t0,
)
from .frame import RecipeNeeded, jacobian_rank, lifted_invariants
from .io import ParseError, expr_latex, parse_expr, load_algebra, render_algebra
from .normalize import eliminate, rescale_to_polynomial
from .verify import check_invariant, is_central, symmetrize

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_RECIPE = 3

_FAMILIES = ("t0", "jordan", "s1", "s2", "s3", "s4", "g6_38")


def _read_source(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, "r") as fh:
        return fh.read()


def _load(path):
    text = _read_source(path)
    return load_algebra(text)


def _fmt(args):
    return expr_latex if args.latex else expr_str


def _emit(args, report, text_lines):
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _parse_fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError("expected a rational number, got %r" % text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args):
    try:
        g = _load(args.file)
    except ParseError as err:
        print("parse error: %s" % err, file=sys.stderr)
        return EXIT_USAGE
    except StructureError as err:
        report = {"valid": False, "problems": str(err).split("; ")}
        _emit(args, report, ["invalid: %s" % p for p in report["problems"]])
        return EXIT_VERIFY
    report = {"valid": True, "dim": g.dim}
    _emit(args, report, ["valid: %d-dimensional Lie algebra" % g.dim])
    return EXIT_OK


def cmd_info(args):
    g = _load(args.file)
    rank, _ = rank_coadjoint(g, seed=args.seed, trials=args.trials)
    zdim = len(center(g))
    derived = derived_series(g)
    lower = lower_central_series(g)
    report = {
        "name": g.name or None,
        "dim": g.dim,
        "params": list(g.params),
        "center_dim": zdim,
        "derived_series": derived,
        "lower_central_series": lower,
        "nilpotent": is_nilpotent(g),
        "solvable": is_solvable(g),
        "coadjoint_rank": rank,
        "num_invariants": g.dim - rank,
    }
    lines = [
        "name: %s" % (g.name or "(unnamed)"),
        "dim: %d" % g.dim,
        "params: %s" % (", ".join(g.params) if g.params else "(none)"),
        "center dim: %d" % zdim,
        "derived series dims: %s" % derived,
        "lower central series dims: %s" % lower,
        "nilpotent: %s, solvable: %s" % (report["nilpotent"], report["solvable"]),
        "coadjoint rank: %d" % rank,
        "independent invariants: %d" % report["num_invariants"],
    ]
    _emit(args, report, lines)
    return EXIT_OK


def cmd_lifted(args):
    g = _load(args.file)
    fmt = _fmt(args)
    try:
        lift = lifted_invariants(g)
    except RecipeNeeded as err:
        print("needs closed-form exponential: %s" % err, file=sys.stderr)
        return EXIT_RECIPE
    exprs = lift.exprs()
    report = {
        "dim": g.dim,
        "thetas": [a.data for a in lift.thetas],
        "lifted": [fmt(f) for f in exprs],
    }
    lines = ["frame parameters: %s" % ", ".join("th%d" % i for i in report["thetas"])]
    for k, f in enumerate(exprs, start=1):
        lines.append("I%d = %s" % (k, fmt(f)))
    _emit(args, report, lines)
    return EXIT_OK


def _pipeline(g, args, recipes=(), exp_recipes=None, signs=None, param_point=None):
    lift = lifted_invariants(g, signs=signs, recipes=exp_recipes)
    res = eliminate(lift, recipes=recipes)
    checks = [check_invariant(g, f) for f in res.invariants]
    rescaled, notes = rescale_to_polynomial(res.invariants)
    rank = jacobian_rank(lift, seed=args.seed, trials=args.trials, param_point=param_point)
    return lift, res, checks, rescaled, notes, rank


def cmd_invariants(args):
    g = _load(args.file)
    fmt = _fmt(args)
    try:
        lift, res, checks, rescaled, notes, rank = _pipeline(g, args)
    except RecipeNeeded as err:
        print("needs closed-form exponential: %s" % err, file=sys.stderr)
        return EXIT_RECIPE
    verified = all(c.ok for c in checks)
    report = {
        "dim": g.dim,
        "frame_rank": rank,
        "expected_count": g.dim - rank,
        "complete": res.complete,
        "invariants": [fmt(f) for f in res.invariants],
        "rescaled": [fmt(f) for f in rescaled],
        "pivots": [
            {"kind": p.kind, "theta": p.theta.data, "solution": expr_str(p.solution)}
            for p in res.pivots
        ],
        "assumptions": [expr_str(a) + " != 0" for a in res.assumptions],
        "applied_recipes": list(res.applied_recipes),
        "residual_count": len(res.residual),
        "verified": verified,
    }
    lines = ["invariants found: %d (rank %d, expected %d)" % (
        res.count, rank, g.dim - rank)]
    for f in res.invariants:
        lines.append("  %s" % fmt(f))
    if any(not (a - b).is_zero() for a, b in zip(rescaled, res.invariants)):
        lines.append("rescaled polynomial forms:")
        for f in rescaled:
            lines.append("  %s" % fmt(f))
        for note in notes:
            lines.append("  note: %s" % note)
    if res.pivots:
        lines.append("normalizations:")
        for p in res.pivots:
            lines.append("  th%d (%s) = %s" % (p.theta.data, p.kind, expr_str(p.solution)))
    if res.applied_recipes:
        lines.append("recipes applied: %s" % ", ".join(res.applied_recipes))
    if report["assumptions"]:
        lines.append("generic assumptions: %s" % "; ".join(report["assumptions"]))
    lines.append("verified against the coadjoint system: %s" % verified)
    if not res.complete:
        lines.append("elimination incomplete: %d lifted expressions unresolved" % len(res.residual))
    _emit(args, report, lines)
    if not res.complete:
        return EXIT_RECIPE
    if not verified or res.count != g.dim - rank:
        return EXIT_VERIFY
    return EXIT_OK


def cmd_verify(args):
    g = _load(args.file)
    fmt = _fmt(args)
    try:
        f = parse_expr(args.expr)
    except ParseError as err:
        print("expression error: %s" % err, file=sys.stderr)
        return EXIT_USAGE
    chk = check_invariant(g, f)
    report = {
        "expr": fmt(f),
        "ok": chk.ok,
        "residuals": [
            {"generator": i + 1, "residual": fmt(r)}
            for i, r in enumerate(chk.residuals)
            if not r.is_zero()
        ],
    }
    lines = ["expression: %s" % report["expr"]]
    if chk.ok:
        lines.append("annihilated by all coadjoint fields: true")
    else:
        for item in report["residuals"]:
            lines.append("X_%d residual: %s" % (item["generator"], item["residual"]))
        lines.append("annihilated by all coadjoint fields: false")
    central = None
    if args.central:
        try:
            central = is_central(g, symmetrize(f), degree_bound=args.degree_bound)
        except KernelError as err:
            lines.append("centrality check unavailable: %s" % err)
        else:
            report["central"] = central
            lines.append("symmetrized element central (degree <= %d): %s" % (
                args.degree_bound, central))
    _emit(args, report, lines)
    if not chk.ok or central is False:
        return EXIT_VERIFY
    return EXIT_OK


def _parse_blocks(text):
    blocks = []
    for piece in text.split(";"):
        piece = piece.strip()
        if not piece:
            continue
        bits = [b.strip() for b in piece.split(",")]
        kind = bits[0]
        if kind == "jordan" and len(bits) == 3:
            blocks.append(("jordan", Fraction(bits[1]), int(bits[2])))
        elif kind == "real" and len(bits) == 4:
            blocks.append(("real", Fraction(bits[1]), Fraction(bits[2]), int(bits[3])))
        else:
            raise argparse.ArgumentTypeError(
                "bad block %r (use jordan,LAMBDA,SIZE or real,MU,NU,HALF)" % piece
            )
    if not blocks:
        raise argparse.ArgumentTypeError("no blocks given")
    return blocks


def _parse_assignments(text):
    out = {}
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if "=" not in piece:
            raise argparse.ArgumentTypeError("bad assignment %r (use INDEX=VALUE)" % piece)
        k, v = piece.split("=", 1)
        out[int(k)] = Fraction(v)
    return out


def _make_family(args):
    name = args.name
    if name == "t0":
        if args.n is None:
            raise argparse.ArgumentTypeError("t0 requires --n")
        return make_t0(args.n)
    if name == "jordan":
        if not args.blocks:
            raise argparse.ArgumentTypeError("jordan requires --blocks")
        return make_jordan(_parse_blocks(args.blocks))
    if name == "s1":
        if args.n is None or args.alpha is None or args.beta is None:
            raise argparse.ArgumentTypeError("s1 requires --n, --alpha and --beta")
        return make_s1(args.n, args.alpha, args.beta)
    if name == "s2":
        if args.n is None:
            raise argparse.ArgumentTypeError("s2 requires --n")
        return make_s2(args.n)
    if name == "s3":
        if args.n is None:
            raise argparse.ArgumentTypeError("s3 requires --n")
        drift = _parse_assignments(args.a) if args.a else None
        return make_s3(args.n, a=drift)
    if name == "s4":
        if args.n is None:
            raise argparse.ArgumentTypeError("s4 requires --n")
        return make_s4(args.n)
    if name == "g6_38":
        a = Fraction(args.a) if args.a is not None else None
        return make_g6_38(a)
    raise argparse.ArgumentTypeError("unknown family %r" % name)


def cmd_family(args):
    fmt = _fmt(args)
    try:
        inst = _make_family(args)
    except (argparse.ArgumentTypeError, StructureError, ValueError) as err:
        print("family error: %s" % err, file=sys.stderr)
        return EXIT_USAGE
    g = inst.algebra
    doc = render_algebra(g)
    checks = [check_invariant(g, f) for f in inst.expected_invariants]
    verified = all(c.ok for c in checks)
    report = {
        "family": args.name,
        "dim": g.dim,
        "document": doc,
        "expected_invariants": [fmt(f) for f in inst.expected_invariants],
        "expected_verified": verified,
    }
    lines = []
    for raw in doc.rstrip("\n").split("\n"):
        lines.append(raw)
    lines.append("# expected invariants (%d):" % len(inst.expected_invariants))
    for f, c in zip(inst.expected_invariants, checks):
        mark = "ok" if c.ok else "FAILS"
        lines.append("#   [%s] %s" % (mark, fmt(f)))
    if args.run:
        try:
            lift, res, rchecks, rescaled, notes, rank = _pipeline(
                g,
                args,
                recipes=inst.recipes,
                exp_recipes=inst.exp_recipes,
                signs=inst.signs,
                param_point=inst.param_point,
            )
        except RecipeNeeded as err:
            print("needs closed-form exponential: %s" % err, file=sys.stderr)
            return EXIT_RECIPE
        run_ok = res.complete and all(c.ok for c in rchecks)
        report["run"] = {
            "complete": res.complete,
            "count": res.count,
            "frame_rank": rank,
            "invariants": [fmt(f) for f in res.invariants],
            "assumptions": [expr_str(a) + " != 0" for a in res.assumptions],
            "verified": run_ok,
        }
        lines.append("# elimination: complete=%s count=%d rank=%d" % (
            res.complete, res.count, rank))
        for f in res.invariants:
            lines.append("#   %s" % fmt(f))
        if report["run"]["assumptions"]:
            lines.append("# generic assumptions: %s" % "; ".join(report["run"]["assumptions"]))
        _emit(args, report, lines)
        if not res.complete:
            return EXIT_RECIPE
        if not (verified and run_ok and res.count == g.dim - rank):
            return EXIT_VERIFY
        return EXIT_OK
    _emit(args, report, lines)
    return EXIT_OK if verified else EXIT_VERIFY


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lieinv",
        description="Exact invariants of finite-dimensional Lie algebras "
        "by the moving-frames normalization method.",
    )
    parser.add_argument("--seed", type=int, default=0, help="sampling seed")
    parser.add_argument("--trials", type=int, default=8, help="sampling trials")
    parser.add_argument("--degree-bound", type=int, default=6,
                        help="degree bound for centrality checks")
    parser.add_argument("--latex", action="store_true", help="render expressions as LaTeX")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a document for structure violations")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("info", help="dimension, series, center, coadjoint rank")
    p.add_argument("file")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("lifted", help="moving-frame lifted invariants")
    p.add_argument("file")
    p.set_defaults(func=cmd_lifted)

    p = sub.add_parser("invariants", help="run the full normalization pipeline")
    p.add_argument("file")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("verify", help="check an expression against the coadjoint system")
    p.add_argument("file")
    p.add_argument("--expr", required=True)
    p.add_argument("--central", action="store_true",
                   help="also check centrality of the symmetrized element")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("family", help="emit a built-in family instance")
    p.add_argument("name", choices=_FAMILIES)
    p.add_argument("--n", type=int, help="size parameter")
    p.add_argument("--blocks", help="jordan blocks, e.g. 'jordan,0,3;real,1,1,2'")
    p.add_argument("--alpha", type=_parse_fraction)
    p.add_argument("--beta", type=_parse_fraction)
    p.add_argument("--a", help="parameter value(s); for s3 use '3=1,4=-2'")
    p.add_argument("--run", action="store_true",
                   help="also run the elimination pipeline")
    p.set_defaults(func=cmd_family)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as err:
        print("cannot read %s" % err.filename, file=sys.stderr)
        return EXIT_USAGE
    except ParseError as err:
        print("parse error: %s" % err, file=sys.stderr)
        return EXIT_USAGE
    except StructureError as err:
        print("structure violation: %s" % err, file=sys.stderr)
        return EXIT_VERIFY
    except KernelError as err:
        print("kernel error: %s" % err, file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
