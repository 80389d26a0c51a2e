"""Print formula vs finite-difference partials for every spec in the derivative corpus."""

import argparse

from bajmeans import corpus
from bajmeans.diagderiv import derivative_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=3)
    ap.add_argument("--order", type=int, default=3, choices=(1, 2, 3))
    args = ap.parse_args()
    for spec in corpus.deriv_corpus():
        print(f"f={spec.generator.expr}  p={[str(e) for e in spec.weights.exprs]}  domain={spec.domain}")
        for x in corpus.interior_points(spec.domain, args.points):
            worst = {}
            for row in derivative_table(spec, x, max_order=args.order):
                k = len(row.index)
                worst[k] = max(worst.get(k, 0.0), row.error)
            cells = "  ".join(f"order {k}: {v:.2e}" for k, v in sorted(worst.items()))
            print(f"  x={x:<10.6g} {cells}")


if __name__ == "__main__":
    main()
