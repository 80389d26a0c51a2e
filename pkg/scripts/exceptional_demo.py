"""Build a symmetric pair of equal means that is not related by a Möbius transform."""

import argparse

import numpy as np

from bajmeans.equality import MobiusRecoveryError, QuadPoly, decide_equality, describe, exceptional_construct, recover_mobius
from bajmeans.exprcore import Interval, MonotoneFn, parse
from bajmeans.mean import mean_eval


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--f", default="x")
    ap.add_argument("--domain", nargs=2, type=float, default=(0.0, 1.0))
    ap.add_argument("--P", nargs=3, type=float, default=(1.0, 0.0, 1.0))
    ap.add_argument("--Q", nargs=3, type=float, default=(1.0, 0.0, 0.0))
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--beta", type=float, default=0.0)
    ap.add_argument("--grid", type=int, default=20)
    args = ap.parse_args()

    f = MonotoneFn(parse(args.f), Interval(*args.domain))
    pair = exceptional_construct(f, QuadPoly(*args.P), QuadPoly(*args.Q), args.alpha, args.beta)
    for k, v in describe(pair).items():
        print(f"{k}: {v}")
    xs = f.domain.grid(args.grid)
    diff = np.array([[mean_eval(pair.spec_f, [s, t]) - mean_eval(pair.spec_g, [s, t]) for t in xs] for s in xs])
    print(f"max discrepancy on {args.grid}x{args.grid} grid: {np.abs(diff).max():.3e}")
    try:
        m = recover_mobius(pair.spec_f.generator, pair.spec_g.generator)
        print(f"Möbius recovery succeeded: {m.as_tuple()}")
    except MobiusRecoveryError as exc:
        print(f"Möbius recovery fails: residual {exc.residual:.3e}")
    print("decision:", decide_equality(pair.spec_f, pair.spec_g).to_json())


if __name__ == "__main__":
    main()
