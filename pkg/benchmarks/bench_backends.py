"""Benchmark the compiled kernel against the pure-Python fallback.

Runs two fixed workloads through both kernel implementations and
reports integrator steps per second, then times the full reference
experiment through the public runner on the active backend.

Usage: python3 benchmarks/bench_backends.py [--steps N] [--repeat R]
"""

import argparse
import math
import time

import numpy as np

from peasim import _kernel, engine
from peasim._kernel import (
    PP_ALPHA,
    PP_DL_MAX,
    PP_DT,
    PP_K,
    PP_KT_M,
    PP_KT_m,
    PP_M_EQ,
    PP_M_TOT,
    PP_N,
    PP_TAU_M_MAX,
    PP_TAU_m_MAX,
    PP_V,
    REGIME_PE_TRIM,
    REGIME_VDD_CONST,
    RP_KD_TRIM,
    RP_SETTLE_TOL,
    RP_TAU_CONST,
)
from peasim.scenario import reference_experiment, run_scenario

try:
    from peasim import _speedup
except ImportError:
    _speedup = None


def _params_pack() -> np.ndarray:
    pp = np.zeros(13)
    pp[PP_DT] = 1e-4
    pp[PP_M_TOT] = 0.2456633
    pp[PP_M_EQ] = 1.6e-5
    pp[PP_N] = 60.0
    pp[PP_K] = 21.0
    pp[PP_ALPHA] = 20.0
    pp[PP_TAU_M_MAX] = 1.6
    pp[PP_TAU_m_MAX] = 0.0303
    pp[PP_KT_M] = 0.2
    pp[PP_KT_m] = 0.0109
    pp[PP_V] = 24.0
    pp[PP_DL_MAX] = math.radians(150.0)
    return pp


def _run_workload(kernel, regime: int, rp: np.ndarray, steps: int, decim: int) -> float:
    pp = _params_pack()
    x = np.array([0.3, 0.0, 0.0, 0.0])
    rows = np.zeros((steps // decim + 2, 18))
    row_modes = np.zeros(steps // decim + 2, dtype=np.int8)
    acc = np.zeros(15)
    io = np.zeros(4, dtype=np.int64)
    empty = np.empty(0)
    # a settle window longer than the budget keeps the trim regime busy
    # for the whole run
    t0 = time.perf_counter()
    kernel.simulate_segment(
        x, 0 if regime == REGIME_PE_TRIM else 1, regime, rp, steps + 1, 0, pp, 0,
        empty, empty, steps, decim, rows, row_modes, acc, io,
    )
    return time.perf_counter() - t0


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200000, help="steps per workload run")
    ap.add_argument("--repeat", type=int, default=3, help="repetitions, best-of")
    ap.add_argument("--decim", type=int, default=1000, help="telemetry decimation")
    args = ap.parse_args()

    # trim gain low and settle tolerance 0 so the budget is always used
    rp_trim = np.zeros(9)
    rp_trim[RP_KD_TRIM] = 0.5
    rp_trim[RP_SETTLE_TOL] = 0.0
    rp_vdd = np.zeros(9)
    rp_vdd[RP_TAU_CONST] = 0.05

    workloads = [
        ("PE trim (spring release)", REGIME_PE_TRIM, rp_trim),
        ("VDD constant torque", REGIME_VDD_CONST, rp_vdd),
    ]
    kernels = [("python", _kernel)]
    if _speedup is not None:
        kernels.append(("compiled", _speedup))

    print(f"steps per run: {args.steps}, best of {args.repeat}")
    for label, regime, rp in workloads:
        print(f"\n{label}:")
        rates = {}
        for name, kernel in kernels:
            best = min(
                _run_workload(kernel, regime, rp, args.steps, args.decim)
                for _ in range(args.repeat)
            )
            rates[name] = args.steps / best
            print(f"  {name:>8s}: {rates[name]:12.0f} steps/s  ({best:.3f} s)")
        if len(rates) == 2:
            print(f"  speedup: {rates['compiled'] / rates['python']:.1f}x")

    script, cfg = reference_experiment()
    t0 = time.perf_counter()
    result = run_scenario(script, cfg)
    wall = time.perf_counter() - t0
    print(
        f"\nreference experiment ({result.final_state.t:.1f} s simulated, "
        f"dt={cfg.dt:g}): {wall:.2f} s wall on '{engine.backend_name()}' backend"
    )


if __name__ == "__main__":
    main()
