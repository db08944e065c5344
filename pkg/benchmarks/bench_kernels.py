"""Time the compiled kernels against the pure-Python reference versions.

Usage::

    python benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on the workload it sees in the library: binomial moments
for the GICAR example at n = 400 with 256 quadrature nodes, greedy filling
of the type classes behind the classical n = 2048 strong converse run, and
type enumeration for a three-letter alphabet. Results from both backends are
checked for agreement before timing.
"""

from __future__ import annotations

import argparse
import math
import timeit

import numpy as np

from qdiv import hypothesis_testing as ht
from qdiv import kernels
from qdiv.gicar import gauss_legendre_01


def workloads():
    x, w = gauss_legendre_01()
    moments = (np.log(w), np.log(x), np.log1p(-x), 400)
    P, Q = ht.merge_by_ratio([0.5, 0.5], [1 / 3, 2 / 3])
    log_p, log_q = ht.type_class_masses(P, Q, 2048)
    log_p3, log_q3 = ht.type_class_masses([0.2, 0.3, 0.5], [0.4, 0.4, 0.2], 300)
    return {
        "log_binom_moments (256 nodes, n=400)": ("log_binom_moments", moments),
        "greedy_fill (2049 classes)": ("greedy_fill", (log_p, log_q, -2048 * 0.25)),
        "greedy_fill (45451 classes)": ("greedy_fill", (log_p3, log_q3, -300 * 0.1)),
        "enumerate_types (n=300, m=3)": ("enumerate_types", (300, 3)),
    }


def _close(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_close(x, y) for x, y in zip(a, b))
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return bool(np.allclose(a, b, rtol=1e-12, atol=1e-12, equal_nan=True))


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5, help="timing repetitions (best is reported)")
    args = parser.parse_args(argv)

    backends = kernels.backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the Python backend is available")
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'kernel':40s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>9s}")
    for label, (name, call_args) in workloads().items():
        results, times = {}, {}
        for bname, mod in backends.items():
            fn = getattr(mod, name)
            results[bname] = fn(*call_args)
            number = 1
            times[bname] = min(timeit.repeat(lambda: fn(*call_args), number=number, repeat=args.repeat)) / number
        if "cython" in results and not _close(results["python"], results["cython"]):
            raise SystemExit(f"backends disagree on {label}")
        py = times["python"] * 1e3
        cy = times.get("cython", math.nan) * 1e3
        print(f"{label:40s} {py:12.3f} {cy:12.3f} {py / cy:8.1f}x")


if __name__ == "__main__":
    main()
