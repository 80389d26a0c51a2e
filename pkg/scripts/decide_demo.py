"""Run the equality decision on random Möbius pairs and random non-equal pairs; tally verdicts."""

import argparse
import collections
import time

import numpy as np

from bajmeans import corpus
from bajmeans.equality import DecisionConfig, decide_equality


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grid", type=int, default=64)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    cfg = DecisionConfig(grid=args.grid)

    t0 = time.perf_counter()
    tally = collections.Counter()
    for k in range(args.count):
        a, b, _ = corpus.mobius_pair(rng, 2 + k % 3, distinct_weights=k % 2 == 0)
        tally["positive", decide_equality(a, b, cfg).status] += 1
    for k in range(args.count):
        kind = ("weights", "generator", "schwarzian")[k % 3]
        a, b = corpus.negative_pair(rng, kind, 2 + k % 3)
        v = decide_equality(a, b, cfg)
        tally["negative", v.status, getattr(v, "failed_check", "-")] += 1
    for key, n in sorted(tally.items()):
        print(" ".join(key), n)
    print(f"elapsed {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
