"""Numba vs numpy timings for the hot kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Workloads mirror the acceptance runs: rejection sampling on P((30,)) and
P((1000,)) for J={1}, and the series sums behind the discrete dual.
The first numba call of each kernel is a warm-up and excluded (compile time
is reported separately).
"""
import argparse
import time

import numpy as np

from partmaxent import _kernels
from partmaxent.domain import Profile
from partmaxent.maxent_discrete import solve_beta_hat
from partmaxent.sampler import _Rejector, make_rng


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads():
    out = []
    for n, rows in ((30, 20000), (1000, 2000)):
        N = Profile((1,), (n,))
        rej = _Rejector(N, solve_beta_hat(N, n=n))
        u = 1.0 - make_rng(0).random((rows, rej.K))
        out.append((f"count_matches n={n} rows={rows} K={rej.K}",
                    lambda flag, u=u, rej=rej: _kernels.count_matches(u, rej.rates, rej.powers,
                                                                      rej.target, use_numba=flag)))
        out.append((f"draw_multiplicities n={n} rows={rows}",
                    lambda flag, u=u, rej=rej: _kernels.draw_multiplicities(u, rej.rates,
                                                                            use_numba=flag)))
    v = make_rng(1).standard_normal(2_000_000) * np.logspace(-8, 8, 2_000_000)
    out.append(("compensated_sum 2e6 terms", lambda flag: _kernels.compensated_sum(v, use_numba=flag)))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels.numba is None:
        print("numba not importable; only the numpy path can run")
    print(f"{'kernel':<48s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s}")
    for name, fn in workloads():
        t_np = best_of(lambda: fn(False), args.repeat)
        if _kernels.numba is None:
            print(f"{name:<48s} {t_np:10.4f} {'-':>10s} {'-':>8s}")
            continue
        t0 = time.perf_counter()
        fn(True)
        warm = time.perf_counter() - t0
        t_nb = best_of(lambda: fn(True), args.repeat)
        print(f"{name:<48s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:7.1f}x   (first call {warm:.2f}s)")


if __name__ == "__main__":
    main()
