"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is called once to trigger compilation, then timed as the best
of ``--repeat`` runs.  Outputs of the two paths are compared as well.
"""

import argparse
import time

import numpy as np

from sawtrap import kernels, lattice
from sawtrap._accel import HAS_NUMBA


def best_of(fn, repeat):
    fn()  # warm-up / JIT
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    rng = np.random.default_rng(1)
    pts = np.sort(rng.uniform(0, 50, 800))[:, None]
    v = kernels.dipole_matrix_numpy(pts, 0.4)
    n = 1_000_000
    z = rng.uniform(5e-4, 0.02, n)
    sp = 0.005 / rng.integers(5, 16, n) / 1e-3
    dj = rng.uniform(-5, 5, n)
    de = rng.uniform(-100, 100, n)
    lam = 2 * np.pi / 50
    xs = rng.uniform(0, lam, 200_000)
    zs = rng.uniform(0, 0.02, 200_000)
    ts = np.zeros(200_000)
    volts = np.array([0.0, 0.0, 1.0])
    H = lattice.anderson_hamiltonian(lattice.LatticeConfig.chain(5))
    G = -1j * H
    y0 = np.zeros(5, complex)
    y0[0] = 1
    te = np.linspace(0, 2.0, 21)
    bh = (z, sp, dj, de, 100.0, 50.0, 0.1, 157.5, True, 1.0)
    fp = (xs, zs, ts, 50.0, lam, 3000.0, volts, 1.0, 3)
    dp = (G, y0, te, 1e-11, 1e-14, 10**7)
    return [
        ("dipole_matrix N=800", lambda: kernels.dipole_matrix_numba(pts, 0.4), lambda: kernels.dipole_matrix_numpy(pts, 0.4)),
        ("laplace_beta N=800", lambda: kernels.laplace_beta_numba(v), lambda: kernels.laplace_beta_numpy(v)),
        ("bh_ratio 1e6 points", lambda: kernels.bh_ratio_numba(*bh), lambda: kernels.bh_ratio_numpy(*bh)),
        ("finger_potential 2e5 x M=3", lambda: kernels.finger_potential_numba(*fp), lambda: kernels.finger_potential_numpy(*fp)),
        ("dp54_linear N=5, T=2", lambda: kernels.dp54_linear_numba(*dp), lambda: kernels.dp54_linear_numpy(*dp)),
    ]


def agree(a, b):
    a = a[0] if isinstance(a, tuple) else a
    b = b[0] if isinstance(b, tuple) else b
    a, b = np.asarray(a), np.asarray(b)
    scale = max(1.0, float(np.max(np.abs(b))))
    return float(np.max(np.abs(a - b))) / scale


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAS_NUMBA:
        print("numba not installed; nothing to compare")
        return
    print(f"{'kernel':30s} {'numba [s]':>11s} {'numpy [s]':>11s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, fast, slow in cases():
        tf = best_of(fast, args.repeat)
        ts = best_of(slow, 1 if name.startswith("dp54") else args.repeat)
        print(f"{name:30s} {tf:11.4g} {ts:11.4g} {ts / tf:8.1f} {agree(fast(), slow()):13.2e}")


if __name__ == "__main__":
    main()
