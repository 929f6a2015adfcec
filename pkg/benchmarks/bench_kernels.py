"""Time the compiled and NumPy kernel backends on identical inputs.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat N] [--out bench.csv]
"""

import argparse
import csv
import sys
import timeit

import numpy as np

from pwsample._backend import available_backends


def _cases(rng):
    x = rng.uniform(-50, 50, 200_000)
    nodes = np.arange(-200, 201, dtype=np.float64)[:, None] + rng.uniform(-0.2, 0.2, (401, 1))
    grid = np.linspace(-20, 20, 4001)[:, None]
    coeffs = rng.standard_normal(401)
    t = np.linspace(-100, 100, 2001)
    xi = np.linspace(0, 1, 256)
    w = rng.uniform(0, 1, 256)
    zeros = nodes[:, 0].copy()
    scales = np.where(zeros == 0, 1.0, -1.0 / zeros)
    return {
        "sinc_pi": lambda k: k.sinc_pi(x),
        "gram_matrix": lambda k: k.gram_matrix(nodes),
        "sinc_synthesis": lambda k: k.sinc_synthesis(grid, nodes, coeffs),
        "cosine_sum": lambda k: k.cosine_sum(t, xi, w),
        "log_abs_product": lambda k: k.log_abs_product(t + 0.5, zeros, scales, 200),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, help="optional CSV destination")
    args = parser.parse_args(argv)

    backends = available_backends()
    cases = _cases(np.random.default_rng(args.seed))
    rows = []
    for name, fn in cases.items():
        times = {}
        for bname, mod in backends.items():
            fn(mod)
            times[bname] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        speedup = times["python"] / times["cython"] if "cython" in times else float("nan")
        rows.append((name, times.get("cython", float("nan")), times["python"], speedup))

    print(f"{'kernel':<18}{'cython [ms]':>14}{'python [ms]':>14}{'speedup':>10}")
    for name, tc, tp, sp in rows:
        print(f"{name:<18}{tc * 1e3:>14.3f}{tp * 1e3:>14.3f}{sp:>10.2f}")
    if "cython" not in backends:
        print("compiled extension not available; only the NumPy backend was timed", file=sys.stderr)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kernel", "cython_s", "python_s", "speedup"])
            w.writerows(rows)


if __name__ == "__main__":
    main()
