#!/usr/bin/env python3
"""Benchmark the calibration grid search: compiled kernel vs pure Python.

The layout-scoring loop dominates `wpansim calibrate`; this script runs the
full coarse-to-fine search once per available backend on an uncalibrated
scenario and reports wall time, checking that both backends return the very
same fit.

Usage: python benchmarks/bench_kernels.py [repeats]
"""

import sys
import time

from wpansim import kernels
from wpansim.calibration import CalibrationTargets, search
from wpansim.cli import default_scenario_path
from wpansim.scenario_file import load_scenario


def detuned_scenario():
    cfg = load_scenario(default_scenario_path())
    cfg.phy.path_loss_exponent = 2.0
    cfg.phy.pl0_db = 40.0
    cfg.phy.rx_sensitivity_dbm = -90.0
    for i, node in enumerate(cfg.stationary_nodes()):
        node.x = 7.0 * i
    return cfg


def main() -> int:
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 3
    cfg = detuned_scenario()
    targets = CalibrationTargets()
    backends = kernels.available_backends()
    print(f"calibration search benchmark ({repeats} repeats each), "
          f"selected backend: {kernels.BACKEND}")

    results = {}
    timings = {}
    for name, impl in backends.items():
        best = None
        for _ in range(repeats):
            t0 = time.perf_counter()
            res = search(cfg, targets, backend=impl)
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
        timings[name] = best
        results[name] = (res.path_loss_exponent, res.pl0_db,
                         res.rx_sensitivity_dbm, res.positions,
                         res.max_boundary_error_m)
        print(f"  {name:12s} {best * 1000:10.1f} ms   "
              f"({res.candidates_scored} parameter combos scored)")

    if len(set(results.values())) != 1:
        print("MISMATCH: backends disagree on the fitted parameters")
        for name, r in results.items():
            print(f"  {name}: {r}")
        return 1
    fit = next(iter(results.values()))
    print(f"  identical fit from every backend: n={fit[0]:g}, pl0={fit[1]:g} dB, "
          f"sensitivity={fit[2]:g} dBm, x={fit[3]}")
    if len(timings) == 2:
        py = timings["pure-python"]
        cy = timings["compiled"]
        print(f"  speedup compiled vs pure-python: {py / cy:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
