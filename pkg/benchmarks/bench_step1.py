"""Timing comparison of the first-step scoring engines.

Runs the full first-step score matrix on one simulated panel with each
requested engine, reports the best wall time over a few repeats, and
cross-checks that the engines agree on every score.  The loop engine is
a plain per-regression reference and is excluded by default; pass
--engines native numpy loop to include it.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from g1dbn._engine import available_engines
from g1dbn.inference import step1_scores
from g1dbn.model import TimeSeries


def _parse_args(argv):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--p", type=int, default=50, help="number of variables")
    parser.add_argument("--n", type=int, default=50, help="number of time points")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats; the best one is reported")
    parser.add_argument("--engines", nargs="+", default=None,
                        help="engines to time (default: all but the loop reference)")
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = _parse_args(argv)
    built = available_engines()
    engines = args.engines or [name for name in built if name != "loop"]
    unknown = [name for name in engines if name not in built]
    if unknown:
        print(f"unavailable engines: {', '.join(unknown)} "
              f"(built: {', '.join(built)})", file=sys.stderr)
        return 2

    # scoring cost does not depend on the values, so a white-noise panel
    # keeps the benchmark valid at any size
    rng = np.random.default_rng(args.seed)
    ts = TimeSeries(rng.standard_normal((args.n, args.p)))

    print(f"first-step scoring: p={args.p}, n={args.n}, "
          f"threads={args.threads}, best of {args.repeats}")
    results = {}
    timings = {}
    for name in engines:
        best = float("inf")
        for _ in range(args.repeats):
            start = time.perf_counter()
            scores = step1_scores(ts, n_threads=args.threads, engine=name)
            best = min(best, time.perf_counter() - start)
        results[name] = scores.scores
        timings[name] = best

    reference = "numpy" if "numpy" in timings else engines[0]
    print(f"{'engine':<8} {'best (s)':>10} {'vs ' + reference:>10}")
    for name in engines:
        ratio = timings[reference] / timings[name]
        print(f"{name:<8} {timings[name]:>10.4f} {ratio:>9.1f}x")

    names = list(results)
    worst = 0.0
    for left, right in zip(names, names[1:]):
        worst = max(worst, float(np.max(np.abs(results[left] - results[right]))))
    if len(names) > 1:
        print(f"max |score difference| between engines: {worst:.3g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
