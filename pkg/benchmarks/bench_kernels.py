#!/usr/bin/env python3
"""Time the compiled kernels against the pure-Python/numpy fallback.

Each backend runs in its own interpreter (the backend is fixed at import
time by NLCAVITY_DISABLE_NUMBA). Compilation is excluded by a warm-up call.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, time
import numpy as np
import nlcavity
from nlcavity.drive import adiabatic_gaussian
from nlcavity.dynamics import BathConfig, integrate, integrate_bath_resolved
from nlcavity.model import SystemParams
from nlcavity.overlap import gaussian_mode, uniform_axes, g2_uniform_pump, PumpField, GAAS

p = SystemParams.from_rates(g1=5e8, gamma=1e8, kappa_a=1e9, kappa_c_in=2e7, kappa_c_ex=2e8, g2=0.0)
p = p.with_phi(float(np.sqrt(1 + p.derived.C_in)))
drive = adiabatic_gaussian(p, 0.3, 16, n=2001)
bath = BathConfig.from_kappa(p.kappa_c_ex, 200, 50 * p.kappa_c)
ax = uniform_axes((64, 32, 32), (4e-6, 2e-6, 2e-6))
fa = gaussian_mode(ax, 2e15, 4e-7, "y")
fc = gaussian_mode(ax, 1.3e15, 4e-7, "z")
pump = PumpField(1e-3, 2.85e-6, 2.85e-6)

def markov():
    integrate(p, drive, drive.t_end, 1e-8, n_samples=501)

def bath_run():
    integrate_bath_resolved(p, drive, bath, 20 / p.kappa_c, 1e-6, n_samples=201, check_decay=False)

def overlap():
    g2_uniform_pump(fa, fc, pump, GAAS)

out = {"backend": nlcavity.backend()}
for name, fn in (("markov", markov), ("bath_200", bath_run), ("overlap_64k", overlap)):
    fn()  # warm-up / compile
    best = float("inf")
    for _ in range(REPEAT):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out[name] = best
print(json.dumps(out))
"""


def run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ, NLCAVITY_DISABLE_NUMBA="1" if disable else "0")
    code = WORKLOAD.replace("REPEAT", str(repeat))
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast = run(False, args.repeat)
    slow = run(True, args.repeat)
    print(f"{'workload':<14}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}")
    for key in fast:
        if key == "backend":
            continue
        print(f"{key:<14}{fast[key]:>11.4f}s{slow[key]:>11.4f}s{slow[key] / fast[key]:>9.1f}x")


if __name__ == "__main__":
    main()
