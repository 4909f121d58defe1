"""Noise-free stability run: median xi_f, xi_R, xi_t over N random problems per motion."""
import argparse
import time

from ac2focal import bench
from ac2focal.synth import MOTIONS

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--trials", type=int, default=1000)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--jobs", type=int, default=None)
args = ap.parse_args()

print(f"{'motion':10s} {'xi_f':>10s} {'xi_R':>10s} {'xi_t':>10s} {'failed':>7s} {'sec':>6s}")
for motion in MOTIONS:
    t0 = time.perf_counter()
    rows, raw = bench.stability_bench(args.trials, motion, args.seed, args.jobs)
    med = {r["metric"]: r["median"] for r in rows}
    n_bad = sum(not r.ok for r in raw)
    print(f"{motion:10s} {med['xi_f']:10.2e} {med['xi_R']:10.2e} {med['xi_t']:10.2e} {n_bad:7d} "
          f"{time.perf_counter() - t0:6.1f}")
