"""Compare the compiled kernels against the NumPy fallback.

    python3 benchmarks/bench_core.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from hsball import _fallback
from hsball.polyfn import basis

try:
    from hsball import _core
except ImportError:
    _core = None


def _case(n, cap, deg, points, seed=0):
    rng = np.random.default_rng(seed)
    b = basis(n, cap)
    k = b.count_upto(deg)
    a = np.zeros(b.size, complex)
    c = np.zeros(b.size, complex)
    a[:k] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    c[:k] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    Z = np.ascontiguousarray(0.5 * (rng.standard_normal((points, n)) + 1j * rng.standard_normal((points, n))) / np.sqrt(n))
    return b, a, c, Z


def bench(impl, b, a, c, Z, cap, repeat):
    t_mul = min(timeit.repeat(lambda: impl.mul_truncated(a, c, b.keys, b.degs, b.lookup, cap), number=20,
                              repeat=repeat)) / 20
    t_eval = min(timeit.repeat(lambda: impl.eval_many(a, b.exps, Z, cap), number=5, repeat=repeat)) / 5
    return t_mul, t_eval


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    cases = [(1, 24, 12, 20000), (2, 12, 6, 20000), (3, 8, 4, 20000)]
    print(f"{'case':<18}{'kernel':<14}{'numpy (ms)':>12}{'cython (ms)':>13}{'speedup':>9}")
    for n, cap, deg, points in cases:
        b, a, c, Z = _case(n, cap, deg, points)
        fb = bench(_fallback, b, a, c, Z, cap, args.repeat)
        cy = bench(_core, b, a, c, Z, cap, args.repeat) if _core else (float("nan"),) * 2
        label = f"n={n} D={cap}"
        for name, x, y in (("mul_truncated", fb[0], cy[0]), ("eval_many", fb[1], cy[1])):
            print(f"{label:<18}{name:<14}{1e3 * x:>12.3f}{1e3 * y:>13.3f}{x / y:>9.2f}")
    if _core is None:
        print("compiled extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()
