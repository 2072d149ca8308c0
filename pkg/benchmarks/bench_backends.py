#!/usr/bin/env python3
"""Times the compiled trajectory kernels against the pure-Python fallback.

Run as ``python benchmarks/bench_backends.py [--steps N]``.  Also checks
that both backends land on the same final state.
"""

import argparse
import time

import numpy as np

from poisint import _fallback, rigidbody
from poisint.rigidbody import RigidBodyParams

try:
    from poisint import _speedups
except ImportError:
    _speedups = None

PARAMS = RigidBodyParams(2.0, 1.0)
M0 = (1.0, 1.0, 1.0)
H = 0.01

METHODS = ("lie_trotter", "lie_trotter_frozen", "strang", "yoshida4")


def run(impl, method, steps):
    inv1, inv3 = 1.0 / PARAMS.I1, 1.0 / PARAMS.I3
    if method == "lie_trotter_frozen":
        args = (*M0, H, steps, inv1, inv3, steps)
        start = time.perf_counter()
        out = impl.run_frozen(*args)
    else:
        axes, coeffs = rigidbody._composition_table(method)
        args = (*M0, H, steps, inv1, inv3, np.ascontiguousarray(axes), np.ascontiguousarray(coeffs), steps)
        start = time.perf_counter()
        out = impl.run_composition(*args)
    return time.perf_counter() - start, out[-1]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=200_000, help="steps per timed run")
    args = parser.parse_args()

    backends = [("pure-python", _fallback)]
    if _speedups is not None:
        backends.insert(0, ("compiled", _speedups))
    else:
        print("compiled extension not built; timing the fallback only\n")

    print(f"{args.steps} steps at h = {H}, m0 = {M0}, I1 = {PARAMS.I1}, I3 = {PARAMS.I3}\n")
    print(f"{'method':<20} {'backend':<12} {'seconds':>10} {'steps/s':>12}")
    for method in METHODS:
        finals = []
        base = None
        for name, impl in backends:
            run(impl, method, min(1000, args.steps))  # warm up
            seconds, final = run(impl, method, args.steps)
            finals.append(final)
            rate = args.steps / seconds
            speedup = "" if base is None else f"  (compiled {seconds / base:.1f}x faster)"
            if base is None:
                base = seconds
            print(f"{method:<20} {name:<12} {seconds:>10.4f} {rate:>12.0f}{speedup}")
        if len(finals) == 2 and np.max(np.abs(finals[0] - finals[1])) > 1e-10:
            raise SystemExit(f"backend mismatch for {method}: {finals}")
    print("\nbackends agree on final states to 1e-10")


if __name__ == "__main__":
    main()
