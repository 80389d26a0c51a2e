"""Command-line front end.

Scalars print as plain numbers with 15 decimals, everything else as JSON.
Exit codes: 0 success, 64 usage error, 65 spec or domain error; ``check-equal``
exits 0/1/2 for Equal/NotEqual/Inconclusive.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .diagderiv import derivative_table
from .equality import (
    ConstructionError,
    DecisionConfig,
    MobiusError,
    MobiusParams,
    QuadPoly,
    decide_equality,
    exceptional_construct,
    transform_spec,
)
from .exprcore import ExprError, Interval, MonotonicityError, to_str
from .geninv import LeftInverse, verify_smf
from .mean import SpecError, generator_from_json, mean_eval, spec_from_json, spec_to_json

EX_USAGE = 64
EX_DATAERR = 65
DEFAULT_SEED = 42

_EXIT = {"Equal": 0, "NotEqual": 1, "Inconclusive": 2}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _num(v: float) -> str:
    # rounding first keeps tiny negatives from printing as "-0.000..."
    v = round(v, 15) + 0.0
    return f"{v:.15f}"


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read {path}: {exc}") from None


def _load(path: str):
    return spec_from_json(_read_json(path))


def cmd_eval(args) -> int:
    spec = _load(args.spec)
    if len(args.x) != spec.n:
        raise UsageError(f"spec has arity {spec.n}, got {len(args.x)} coordinates")
    # scalars are printed to 15 decimals, so invert to full precision
    print(_num(mean_eval(spec.with_xtol(0.0), args.x)))
    return 0


def cmd_invert(args) -> int:
    f = generator_from_json(_read_json(args.spec))
    print(_num(LeftInverse.of(f, xtol=0.0)(args.y)))
    return 0


def cmd_derivs(args) -> int:
    spec = _load(args.spec)
    rows = derivative_table(spec, args.x, max_order=args.order)
    _emit([r.to_json() for r in rows])
    return 0


def cmd_transform(args) -> int:
    spec = _load(args.spec)
    out = spec_to_json(transform_spec(spec, MobiusParams(args.a, args.b, args.c, args.d)))
    if args.out:
        Path(args.out).write_text(json.dumps(out, indent=2) + "\n")
    else:
        _emit(out)
    return 0


def _config(args) -> DecisionConfig:
    kw = {"seed": args.seed}
    if args.grid is not None:
        kw["grid"] = args.grid
    if args.tol is not None:
        kw["tol"] = args.tol
    return DecisionConfig(**kw)


def cmd_check_equal(args) -> int:
    a, b = _load(args.spec_a), _load(args.spec_b)
    if a.n != b.n:
        raise UsageError(f"arity mismatch: {a.n} vs {b.n}")
    if a.domain != b.domain:
        raise SpecError("specs must share the domain")
    verdict = decide_equality(a, b, _config(args))
    out = verdict.to_json()
    out["seed"] = args.seed
    _emit(out)
    return _EXIT[verdict.status]


def cmd_make_exceptional(args) -> int:
    f = generator_from_json(_read_json(args.spec))
    gdom = Interval(*args.g_domain) if args.g_domain else None
    kw = {}
    if args.tol is not None:
        kw["tol"] = args.tol
    if args.grid is not None:
        kw["check_grid"] = args.grid
    pair = exceptional_construct(f, QuadPoly(*args.P), QuadPoly(*args.Q), args.alpha, args.beta, gdom, **kw)
    out = {
        "g": to_str(pair.g.expr),
        "p": to_str(pair.p),
        "q": to_str(pair.q),
        "discrepancy": pair.discrepancy,
        "spec_f": spec_to_json(pair.spec_f),
        "spec_g": spec_to_json(pair.spec_g),
    }
    if args.out_prefix:
        for key in ("spec_f", "spec_g"):
            Path(f"{args.out_prefix}_{key[-1]}.json").write_text(json.dumps(out[key], indent=2) + "\n")
    _emit(out)
    return 0


def cmd_verify_smf(args) -> int:
    f = generator_from_json(_read_json(args.spec))
    kw = {}
    if args.tol is not None:
        kw["tol"] = args.tol
    if args.grid is not None:
        kw["grid_size"] = args.grid
    report = verify_smf(f, LeftInverse.of(f), **kw)
    _emit(report.to_json())
    return 0 if report.all_pass else 1


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="pass tolerance")
    common.add_argument("--grid", type=int, default=argparse.SUPPRESS, help="grid size")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help=f"RNG seed (default {DEFAULT_SEED})")

    p = _Parser(prog="bajmeans", description="Generalized Bajraktarević means.", parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("eval", parents=[common], help="evaluate a mean")
    s.add_argument("spec")
    s.add_argument("x", type=float, nargs="+")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("invert", parents=[common], help="generalized left inverse of a generator")
    s.add_argument("spec")
    s.add_argument("y", type=float)
    s.set_defaults(func=cmd_invert)

    s = sub.add_parser("derivs", parents=[common], help="diagonal partials: formula vs finite differences")
    s.add_argument("spec")
    s.add_argument("x", type=float)
    s.add_argument("--order", type=int, default=3, choices=(1, 2, 3))
    s.set_defaults(func=cmd_derivs)

    s = sub.add_parser("transform", parents=[common], help="apply a Möbius transform to a spec")
    s.add_argument("spec")
    for k in "abcd":
        s.add_argument(k, type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("check-equal", parents=[common], help="decide equality of two means")
    s.add_argument("spec_a")
    s.add_argument("spec_b")
    s.set_defaults(func=cmd_check_equal)

    s = sub.add_parser("make-exceptional", parents=[common], help="build a symmetric non-Möbius equal pair")
    s.add_argument("spec", help="generator JSON (f, domain)")
    s.add_argument("--P", type=float, nargs=3, default=[1.0, 0.0, 0.0], metavar=("C0", "C1", "C2"))
    s.add_argument("--Q", type=float, nargs=3, default=[1.0, 0.0, 0.0], metavar=("C0", "C1", "C2"))
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--beta", type=float, default=0.0)
    s.add_argument("--g-domain", type=float, nargs=2, metavar=("LO", "HI"))
    s.add_argument("--out-prefix", help="also write PREFIX_f.json and PREFIX_g.json")
    s.set_defaults(func=cmd_make_exceptional)

    s = sub.add_parser("verify-smf", parents=[common], help="grid checks of the left inverse")
    s.add_argument("spec")
    s.set_defaults(func=cmd_verify_smf)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    for k, default in (("tol", None), ("grid", None), ("seed", DEFAULT_SEED)):
        if not hasattr(args, k):
            setattr(args, k, default)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"bajmeans: usage error: {exc}", file=sys.stderr)
        return EX_USAGE
    except (SpecError, ExprError, MonotonicityError, MobiusError, ConstructionError, ValueError) as exc:
        print(f"bajmeans: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EX_DATAERR


if __name__ == "__main__":
    sys.exit(main())
