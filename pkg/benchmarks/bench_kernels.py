"""Compare the compiled and numpy replicate kernels.

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --sizes 5 15 100 1000 --B 10000 --repeat 5

Prints one row per (kernel, n) with the best wall time of ``--repeat`` runs
and the speed-up of the compiled backend. Both backends must return identical
replicate means; the script aborts otherwise.
"""
import argparse
import sys
import timeit

import numpy as np

from bootcover import _backend


def time_kernel(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[5, 10, 15, 100, 1000])
    p.add_argument("--B", type=int, default=10_000)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    backends = ["python"] + (["cython"] if _backend.compiled is not None else [])
    if len(backends) == 1:
        print("compiled kernels not built; timing the numpy fallback only", file=sys.stderr)

    print(f"{'kernel':<10}{'n':>6}{'B':>8}" + "".join(f"{b + ' ms':>12}" for b in backends) + f"{'speed-up':>10}")
    for kernel in ("standard_means", "bayesian_means"):
        for n in args.sizes:
            x = np.random.default_rng(args.seed).lognormal(0.0, 5.0, n)
            results, times = [], []
            for name in backends:
                fn = getattr(_backend.get_kernels(name), kernel)
                out = fn(x, args.B, np.random.PCG64(args.seed))
                results.append(out[0] if isinstance(out, tuple) else out)
                times.append(time_kernel(lambda: fn(x, args.B, np.random.PCG64(args.seed)), args.repeat))
            if len(results) == 2 and not np.array_equal(results[0], results[1]):
                sys.exit(f"{kernel} n={n}: backends disagree")
            speedup = f"{times[0] / times[-1]:>9.1f}x" if len(times) == 2 else f"{'-':>10}"
            label = kernel.split("_")[0][:8]
            print(f"{label:<10}{n:>6}{args.B:>8}" + "".join(f"{1e3 * t:>12.2f}" for t in times) + speedup)


if __name__ == "__main__":
    main()
