"""Compare the kernel backends across vocabulary sizes.

Usage: python3 benchmarks/bench_kernels.py [--reps 500] [--sizes 512,4096,32768]

Prints one row per (size, backend, op) with median and p90 in
microseconds, plus a per-size speedup line.  Run on a quiet machine;
the numbers move with CPU frequency scaling.
"""

import argparse
import statistics
import time

import numpy as np

from toolgate.fsm.tokenfsm import pack_mask
from toolgate.kernels import BACKEND, available_backends


def make_cases(n, rng, densities=(0.01, 0.1, 0.5)):
    cases = []
    for d in densities:
        k = max(1, int(n * d))
        bits = np.sort(rng.choice(n, size=k, replace=False))
        cases.append(pack_mask([int(b) for b in bits], n))
    p = rng.random(n)
    p /= p.sum()
    return p, cases


def bench(fn, reps):
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        fn()
        t1 = time.perf_counter_ns()
        samples.append((t1 - t0) / 1e3)
    samples.sort()
    return samples[len(samples) // 2], samples[int(len(samples) * 0.9)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=500)
    ap.add_argument("--sizes", default="512,4096,32768")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(1)
    impls = available_backends()
    print(f"active backend: {BACKEND}")
    print(f"{'size':>7} {'backend':>8} {'op':>7} {'median_us':>10} {'p90_us':>8}")
    for n in sizes:
        p, masks = make_cases(n, rng)
        out = np.empty(n)
        medians = {}
        for name, impl in sorted(impls.items()):
            it = iter(range(10**9))

            def renorm_step():
                impl.renorm_masked(p, masks[next(it) % len(masks)], out)

            med, p90 = bench(renorm_step, args.reps)
            medians[name] = med
            print(f"{n:>7} {name:>8} {'renorm':>7} {med:>10.1f} {p90:>8.1f}")

            impl.renorm_masked(p, masks[0], out)

            def pick_step():
                impl.cum_pick(out, masks[0], 0.6180339887)

            med, p90 = bench(pick_step, args.reps)
            print(f"{n:>7} {name:>8} {'pick':>7} {med:>10.1f} {p90:>8.1f}")
        if "cython" in medians and "python" in medians and medians["cython"] > 0:
            print(f"{n:>7} renorm speedup: "
                  f"{medians['python'] / medians['cython']:.1f}x")


if __name__ == "__main__":
    main()
