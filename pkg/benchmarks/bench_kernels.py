"""Compare the numba-compiled and pure-numpy variants of each hot kernel.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``. Compilation is
triggered once before timing, so the numba figures exclude JIT cost.
"""
import argparse
import timeit

import numpy as np

from modsel import kernels
from modsel.lasso import LassoProblem


def _lasso_case(rng, n=200, p=500):
    Z = rng.standard_normal((n, p))
    prob = LassoProblem.standardized(Z, Z[:, 0] * 3 + rng.standard_normal(n), 2 * n * 0.3)
    X = np.ascontiguousarray(prob.X)
    col_sq = np.einsum("ij,ij->j", X, X)

    def run(fn):
        beta = np.zeros(X.shape[1])
        fn(X, prob.y, beta, prob.penalty, 1e-10, 10_000, col_sq, np.empty(10_001))
    return run


def _mixture_case(rng, m=10_000, g=1000):
    lr1 = np.expm1(rng.standard_normal(m))
    grid = np.linspace(0, 1, g)

    def run(fn):
        fn(lr1, grid, np.empty(g))
    return run


def _step_up_case(rng, m=100_000):
    p = np.sort(rng.uniform(size=m))

    def run(fn):
        fn(p, 0.05)
    return run


CASES = {
    "cd_lasso (n=200, p=500)": (_lasso_case, kernels._cd_lasso_numba, kernels._cd_lasso_numpy),
    "mixture_loglik (m=1e4, grid=1e3)": (_mixture_case, kernels._mixture_loglik_numba,
                                         kernels._mixture_loglik_numpy),
    "step_up (m=1e5)": (_step_up_case, kernels._step_up_numba, kernels._step_up_numpy),
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':36s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s}")
    for name, (make, fast, slow) in CASES.items():
        run = make(rng)
        run(fast)  # compile
        t_fast = min(timeit.repeat(lambda: run(fast), number=1, repeat=args.repeat))
        t_slow = min(timeit.repeat(lambda: run(slow), number=1, repeat=args.repeat))
        print(f"{name:36s} {1e3 * t_fast:11.2f} {1e3 * t_slow:11.2f} {t_slow / t_fast:7.1f}x")


if __name__ == "__main__":
    main()
