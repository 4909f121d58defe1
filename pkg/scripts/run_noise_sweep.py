"""Median errors against one noise parameter, for each motion pattern.

Writes one CSV per motion to --out (default: current directory) and prints
the eps medians.
"""
import argparse
from pathlib import Path

from ac2focal import bench
from ac2focal.synth import MOTIONS

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--sweep", choices=sorted(bench.SWEEPS), default="image")
ap.add_argument("--trials", type=int, default=500)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--jobs", type=int, default=None)
ap.add_argument("--out", type=Path, default=Path("."))
args = ap.parse_args()

args.out.mkdir(parents=True, exist_ok=True)
for motion in MOTIONS:
    rows, _ = bench.noise_bench(args.sweep, trials=args.trials, motion=motion, seed=args.seed, jobs=args.jobs)
    (args.out / f"noise_{args.sweep}_{motion}.csv").write_text(bench.to_csv(rows))
    for metric in ("eps_f", "eps_R", "eps_t"):
        med = [r["median"] for r in rows if r["metric"] == metric]
        print(f"{motion:9s} {metric}: " + " ".join(f"{m:8.4f}" for m in med))
