#!/usr/bin/env python3
"""Compare the compiled kernels against the NumPy fallback.

Times the three hot kernels at production sizes and one full pulse-recovery
run per backend.  Run from the repository root:

    python benchmarks/bench_backends.py
"""

import time

import numpy as np

from mfsi import backends, pipeline
from mfsi.scenario import load_scenario

N_FREQ = 48


def timeit(fn, repeat=5):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_jacobi(kern, n):
    rng = np.random.default_rng(0)
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    a = m + m.conj().T
    return timeit(lambda: kern.jacobi_eigh(a), repeat=3)


def bench_picard(kern, n_pts):
    rng = np.random.default_rng(1)
    xs = rng.uniform(-10, 10, n_pts)
    psi = rng.standard_normal((N_FREQ, 12)) + 1j * rng.standard_normal((N_FREQ, 12))
    inv_lam = rng.uniform(0.5, 2.0, 12)
    return timeit(lambda: kern.picard_sums(xs, np.pi / 16, N_FREQ, psi, inv_lam))


def bench_band(kern, n_pts):
    rng = np.random.default_rng(2)
    amp = rng.uniform(-1, 1, n_pts)
    xs = rng.uniform(-5, 5, n_pts)
    return timeit(lambda: kern.band_sums(amp, xs, -9.0, np.pi / 16, 95))


def bench_pulse_run():
    cfg = {
        "schema_version": 1,
        "scene": {
            "shape": {"kind": "disk", "radius": 1.0},
            "profile": {"kind": "polynomial2d"},
            "trajectory": {"kind": "fixed", "point": [0.0, 0.0]},
            "pulses": [4.0],
        },
        "frequency": {"kappa": 0.0, "half_band": 3 * np.pi, "count": 48},
        "directions": {"angles_deg": [0]},
        "sampling": {"box_min": [-6, -6], "box_max": [6, 6], "resolution": [121, 121]},
        "eta_window": {"min": 0.0, "max": 10.0, "step": 0.05},
    }
    sc = load_scenario(cfg)
    pairs = pipeline.pulse_operators(sc, 0)
    t0 = time.perf_counter()
    pipeline.estimate_pulse_moment(sc, 0, pairs[0])
    return time.perf_counter() - t0


def main():
    rows = []
    for name in backends.available():
        kern = backends.select(name)
        rows.append((
            name,
            bench_jacobi(kern, 48),
            bench_jacobi(kern, 96),
            bench_picard(kern, 14641),
            bench_band(kern, 31416),
            bench_pulse_run(),
        ))
    hdr = f"{'backend':<10}{'jacobi48':>10}{'jacobi96':>10}{'picard14k':>11}" \
          f"{'band31k':>10}{'pulse-run':>11}"
    print(hdr)
    print("-" * len(hdr))
    for name, *vals in rows:
        print(f"{name:<10}" + "".join(f"{v * 1e3:>9.1f}m" for v in vals))
    if len(rows) == 2:
        print("\nspeedup (numpy / compiled):")
        comp = dict(zip([r[0] for r in rows], rows))
        for i, label in enumerate(["jacobi48", "jacobi96", "picard14k", "band31k",
                                   "pulse-run"], start=1):
            ratio = comp["numpy"][i] / comp["compiled"][i]
            print(f"  {label:<10} {ratio:5.1f}x")


if __name__ == "__main__":
    main()
