"""Compare the compiled and pure-numpy integrator backends.

Each backend runs in its own subprocess (the backend choice is frozen at
import time by the PAIRDVA_NUMBA environment variable), timing the same
simulate + feature-extraction workload and dumping its terminal-voltage
trace so the parent can verify the backends agree numerically.

Usage: python benchmarks/bench_backends.py [--reps N]
"""

import argparse
import json
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np


def run_child(reps: int, out_npy: str) -> int:
    import pairdva

    def workload():
        trace = pairdva.simulate_cc_discharge(pairdva.make_pair(0.8, 1.3))
        feats = pairdva.extract_features(trace)
        return trace, feats

    t0 = time.perf_counter()
    workload()
    warmup_s = time.perf_counter() - t0

    t0 = time.perf_counter()
    for _ in range(reps):
        trace = pairdva.simulate_cc_discharge(pairdva.make_pair(0.8, 1.3))
    sim_s = (time.perf_counter() - t0) / reps

    t0 = time.perf_counter()
    for _ in range(reps):
        feats = pairdva.extract_features(trace)
    feat_s = (time.perf_counter() - t0) / reps

    np.save(out_npy, trace.v_t)
    print(json.dumps({
        "backend": pairdva.backend(),
        "warmup_s": warmup_s,
        "sim_s": sim_s,
        "feat_s": feat_s,
        "n_samples": len(trace.v_t),
        "height": feats.height,
    }))
    return 0


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--reps", type=int, default=5,
                        help="timed repetitions per backend (default 5)")
    parser.add_argument("--child", action="store_true",
                        help=argparse.SUPPRESS)
    parser.add_argument("--out", default=None, help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.child:
        return run_child(args.reps, args.out)

    results = {}
    with tempfile.TemporaryDirectory() as tmp:
        for flag in ("1", "0"):
            out = str(Path(tmp) / f"vt_{flag}.npy")
            env = os.environ.copy()
            env["PAIRDVA_NUMBA"] = flag
            proc = subprocess.run(
                [sys.executable, __file__, "--child",
                 "--reps", str(args.reps), "--out", out],
                capture_output=True, text=True, env=env, check=True)
            results[flag] = json.loads(proc.stdout.splitlines()[-1])
            results[flag]["v_t"] = np.load(out)

    numba, plain = results["1"], results["0"]
    dv = float(np.abs(numba.pop("v_t") - plain.pop("v_t")).max())

    print(f"{'backend':<10} {'warmup [s]':>12} {'sim [ms]':>10} "
          f"{'features [ms]':>14}")
    for row in (numba, plain):
        print(f"{row['backend']:<10} {row['warmup_s']:>12.3f} "
              f"{row['sim_s'] * 1e3:>10.2f} {row['feat_s'] * 1e3:>14.2f}")
    print(f"simulation speedup (numpy/compiled): "
          f"{plain['sim_s'] / numba['sim_s']:.1f}x")
    print(f"cross-backend max|dV_t|: {dv:.3g} V "
          f"({numba['n_samples']} samples)")
    if dv > 1e-9:
        print("WARNING: backends disagree beyond 1e-9 V", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
