"""Compare the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

Each row times one kernel on the same random input for both backends and
checks that the two return the same value.
"""

import argparse
import math
import timeit

import numpy as np

from szlenk_lab import _kernels_py as py
from szlenk_lab import kernels


def inputs(rng):
    def vec(n, spread):
        idx = sorted(int(i) for i in rng.choice(np.arange(1, spread + 1), size=n, replace=False))
        return idx, [float(x) for x in np.abs(rng.normal(size=n))]

    t_idx, t_a = vec(40, 80)
    s_a = vec(120, 200)[1]
    phi = [1.0, 1.0] + [math.log2(n + 1) for n in range(2, len(s_a) + 1)]
    bnb = vec(12, 24)
    topk = vec(300, 600)
    return [
        ("t_table  |supp|=40", lambda k: k.t_table(t_idx, t_a), lambda r: r[0][0][len(t_a) - 1]),
        ("s_table  |supp|=120", lambda k: k.s_table(s_a, phi), lambda r: r[0][0][len(s_a) - 1]),
        ("b_bnb    |supp|=12", lambda k: k.b_bnb(*bnb), lambda r: r[0]),
        ("b_topk   |supp|=300", lambda k: k.b_topk(*topk), lambda r: r[0]),
        ("b_interval |supp|=300", lambda k: k.b_interval(*topk), lambda r: r[0]),
    ]


def best_time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if kernels.compiled is None:
        print("compiled extension not available; build it with `python3 setup.py build_ext --inplace`")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<24}{'cython [s]':>12}{'python [s]':>12}{'speedup':>10}  agree")
    for name, call, value in inputs(rng):
        a, b = value(call(kernels.compiled)), value(call(py))
        agree = abs(float(a) - float(b)) <= 1e-9 * max(1.0, abs(float(b)))
        tc = best_time(lambda: call(kernels.compiled), args.repeat)
        tp = best_time(lambda: call(py), max(1, args.repeat // 2))
        print(f"{name:<24}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.1f}x  {'yes' if agree else 'NO'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
