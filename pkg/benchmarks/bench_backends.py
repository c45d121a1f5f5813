"""Time the numba kernels against the pure-numpy fallback.

Usage::

    python benchmarks/bench_backends.py [--repeat 5] [--N 60]

Kernel timings exclude JIT compilation (one warm-up call first). The design
row runs a short receding-horizon design with each backend swapped in and
checks that both produce the same signal.
"""

import argparse
import time

import numpy as np

from rhcexcite import kernels
from rhcexcite.core import Constraints, RunConfig, seeded_rng
from rhcexcite.criterion import DistanceDataset, build_psi
from rhcexcite.optimizer import SaConfig, design_signal
from rhcexcite.surrogate import SurrogateModel


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_cases(rng):
    psi = rng.uniform(0, 1, (225, 2))
    q = np.ones(len(psi))
    X = rng.uniform(0, 1, (500, 2))
    base = kernels.NUMPY.nn_min_dist(psi, X, 0)
    Z = rng.uniform(0, 1, (3, 2))
    big_psi = rng.uniform(0, 1, (4000, 2))
    big_X = rng.uniform(0, 1, (4000, 2))
    return {
        "nn_min_dist 225x500": lambda k: k.nn_min_dist(psi, X, 0),
        "nn_min_dist 4000x4000": lambda k: k.nn_min_dist(big_psi, big_X, 0),
        "horizon_cost L=3": lambda k: k.horizon_cost(psi, q, base, Z, 0),
        "arx_simulate 1000": lambda k: k.arx_simulate(0.8, 0.2, 0.0, X[:, 0]),
    }


def run_design(backend, N):
    box = Constraints((-1.0, 1.0), [[-1.0, 1.0], [-1.0, 1.0]])
    P = build_psi(box, (15, 15))
    psi = DistanceDataset(P, np.ones(len(P)))
    saved = kernels.ACTIVE
    kernels.ACTIVE = backend
    try:
        return design_signal(RunConfig(N, 3, 0), box, SurrogateModel(), psi, SaConfig())
    finally:
        kernels.ACTIVE = saved


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--N", type=int, default=60, help="design length for the end-to-end row")
    args = ap.parse_args(argv)

    if kernels.NUMBA is None:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = seeded_rng(0)
    print(f"{'case':<26}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, call in kernel_cases(rng).items():
        t_np = best_of(lambda: call(kernels.NUMPY), args.repeat)
        t_nb = best_of(lambda: call(kernels.NUMBA), args.repeat)
        print(f"{name:<26}{t_np:>12.3e}{t_nb:>12.3e}{t_np / t_nb:>10.1f}")

    run_design(kernels.NUMBA, 3)  # compile the SA chain
    t0 = time.perf_counter()
    a = run_design(kernels.NUMBA, args.N)
    t_nb = time.perf_counter() - t0
    t0 = time.perf_counter()
    b = run_design(kernels.NUMPY, args.N)
    t_np = time.perf_counter() - t0
    same = np.allclose(a.signal.samples, b.signal.samples, atol=1e-12)
    print(f"{f'design N={args.N}, L=3':<26}{t_np:>12.3e}{t_nb:>12.3e}{t_np / t_nb:>10.1f}")
    print(f"signals agree across backends: {same}")


if __name__ == "__main__":
    main()
