"""Time the tournament kernel for every available backend.

Usage: python benchmarks/bench_engine.py [--n 2000 6400 20000] [--repeat 3]

Also checks that all backends produce the same scores for the same seed.
"""
import argparse
import time

import numpy as np

from extremescore import _backend
from extremescore.distributions import parse_distribution
from extremescore.engine import simulate_scores
from extremescore.rng import RandomStream


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[500, 2000, 6400])
    ap.add_argument("--dist", default="m1")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    d = parse_distribution(args.dist)
    backends = sorted(_backend.available())
    print(f"dist={args.dist} backends={','.join(backends)} (best of {args.repeat})")
    print(f"{'n':>7} " + " ".join(f"{b:>10}" for b in backends) + "   speedup  identical")
    for n in args.n:
        timings, outputs = {}, {}
        for b in backends:
            timings[b], v = best_of(lambda: simulate_scores(d, n, RandomStream(args.seed), backend=b), args.repeat)
            outputs[b] = v.scores
        same = all(np.array_equal(outputs[backends[0]], o) for o in outputs.values())
        speedup = timings["python"] / timings["cython"] if len(backends) == 2 else float("nan")
        cells = " ".join(f"{timings[b] * 1e3:8.1f}ms" for b in backends)
        print(f"{n:>7} {cells}   {speedup:7.1f}  {same}")


if __name__ == "__main__":
    main()
