"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from bracketlab import kernels
from bracketlab.generators import gen_double_elim, gen_round_robin, gen_single_elim
from bracketlab.precision import Seeded, enumerate_all


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads():
    se, de, rr = gen_single_elim(3), gen_double_elim(3), gen_round_robin(8)
    rng = np.random.default_rng(0)
    rem = np.array([rng.choice(8, 2, replace=False) for _ in range(16)], dtype=np.int32)
    base = np.array([5, 3, 2, 2, 2, 2, 2, 2], dtype=np.int32)
    return [
        ("SE-8 tally (40320)", lambda b: enumerate_all(se, backend=b)),
        ("DE-8 tally (40320)", lambda b: enumerate_all(de, backend=b)),
        ("DE-8 seeded (576)", lambda b: enumerate_all(de, Seeded.top_half(de), backend=b)),
        ("RR-8 tally (40320)", lambda b: enumerate_all(rr, backend=b)),
        ("RR completions 2^16", lambda b: kernels.backends()[b].rr_completion_classes(8, base, rem)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = sorted(kernels.backends())
    if "cython" not in names:
        print("compiled extension not built; only the Python fallback is timed")
    print(f"{'workload':<22}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in workloads():
        t = {n: _best(lambda: fn(n), args.repeat) for n in names}
        line = f"{label:<22}" + "".join(f"{t[n]:>11.4f}s" for n in names)
        if len(names) > 1:
            line += f"{t['python'] / t['cython']:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
