"""Command line: synth | solve | estimate | bench.

Angles on the command line are degrees. Exit codes:

    0 success             5 degenerate input        8 no model found
    2 bad flags           6 degenerate null space   9 too few correspondences
    3 I/O error           7 eigensolver failure
    4 dataset parse error
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import bench, dataset
from .ransac import NoModelFound, RansacConfig, TooFewCorrespondences, estimate
from .solver import SolveOptions, solve_2ac
from .synth import MOTIONS, NoiseConfig, SceneConfig, generate_scene
from .types import DegenerateInput, DegenerateNullspace, EigenFailure

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_PARSE = 4
EXIT_DEGENERATE_INPUT = 5
EXIT_DEGENERATE_NULLSPACE = 6
EXIT_EIGEN = 7
EXIT_NO_MODEL = 8
EXIT_TOO_FEW = 9

_ERROR_CODES = (
    (dataset.DatasetParseError, EXIT_PARSE),
    (DegenerateInput, EXIT_DEGENERATE_INPUT),
    (DegenerateNullspace, EXIT_DEGENERATE_NULLSPACE),
    (EigenFailure, EXIT_EIGEN),
    (NoModelFound, EXIT_NO_MODEL),
    (TooFewCorrespondences, EXIT_TOO_FEW),
    (OSError, EXIT_IO),
)

BENCH_HELP = """\
CSV columns: sweep_value, metric, median, q25, q75.
metric is one of eps_f (relative focal error), eps_R (rotation error, deg),
eps_t (translation direction error, deg), xi_f, xi_R (Frobenius), xi_t.
"""


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return conv


def _nonnegative(text):
    v = float(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _emit(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_synth(args) -> int:
    noise = NoiseConfig(
        image_px=args.noise_image,
        pitch_deg=args.noise_pitch,
        roll_deg=args.noise_roll,
        principal_px=args.noise_principal,
        affine=not args.no_affine_noise,
    )
    cfg = SceneConfig(
        n_points=args.n_points,
        motion=args.motion,
        noise=noise,
        outlier_fraction=args.outliers,
        seed=args.seed,
    )
    _emit(dataset.dumps(dataset.DatasetFile.from_scene(generate_scene(cfg))), args.output)
    return EXIT_OK


def _solve_opts(args) -> SolveOptions:
    return SolveOptions(
        run_both_row_assignments=not args.single_assignment,
        require_cheirality=not args.no_cheirality,
        min_focal_px=args.min_focal,
        max_focal_px=args.max_focal,
    )


def cmd_solve(args) -> int:
    ds = dataset.read(args.dataset)
    i, j = args.pair
    n = len(ds.correspondences)
    if not (0 <= i < n and 0 <= j < n):
        print(f"error: --pair indices must lie in [0, {n})", file=sys.stderr)
        return EXIT_USAGE
    cands = solve_2ac(ds.correspondences[i], ds.correspondences[j], ds.imu_i, ds.imu_j,
                      ds.principal_point, _solve_opts(args))
    _emit(json.dumps([c.to_dict() for c in cands], indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_estimate(args) -> int:
    ds = dataset.read(args.dataset)
    cfg = RansacConfig(
        max_iterations=args.max_iterations,
        confidence=args.confidence,
        inlier_threshold_px=args.threshold,
        min_inliers=args.min_inliers,
        seed=args.seed,
        solve=_solve_opts(args),
    )
    res = estimate(ds.correspondences, ds.imu_i, ds.imu_j, ds.principal_point, cfg)
    out = res.to_dict()
    out["inlier_ratio"] = res.n_inliers / len(ds.correspondences)
    _emit(json.dumps(out, indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.kind == "stability":
        rows, _ = bench.stability_bench(args.trials or 1000, args.motion, args.seed, args.jobs)
    else:
        rows, _ = bench.noise_bench(args.sweep, args.values, args.trials or 500, args.motion, args.seed,
                                    jobs=args.jobs)
    _emit(bench.to_csv(rows), args.output)
    return EXIT_OK


def _add_solver_flags(p):
    p.add_argument("--single-assignment", action="store_true",
                   help="only let the first AC of the pair contribute its affine rows")
    p.add_argument("--no-cheirality", action="store_true", help="keep candidates failing cheirality")
    p.add_argument("--min-focal", type=_positive(float), default=50.0, help="px")
    p.add_argument("--max-focal", type=_positive(float), default=10000.0, help="px")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ac2focal", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic dataset")
    p.add_argument("--motion", choices=MOTIONS, default="random")
    p.add_argument("--n-points", type=_positive(int), default=100)
    p.add_argument("--noise-image", type=_nonnegative, default=0.0, help="px")
    p.add_argument("--noise-pitch", type=_nonnegative, default=0.0, help="deg")
    p.add_argument("--noise-roll", type=_nonnegative, default=0.0, help="deg")
    p.add_argument("--noise-principal", type=_nonnegative, default=0.0, help="px")
    p.add_argument("--no-affine-noise", action="store_true", help="keep affine matrices noise-free")
    p.add_argument("--outliers", type=_nonnegative, default=0.0, help="fraction in [0, 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("solve", help="run the minimal solver on one pair")
    p.add_argument("dataset")
    p.add_argument("--pair", nargs=2, type=int, metavar=("I", "J"), default=(0, 1))
    p.add_argument("-o", "--output", default="-")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("estimate", help="robust estimation over all correspondences")
    p.add_argument("dataset")
    p.add_argument("--threshold", type=_positive(float), default=1.0, help="Sampson inlier threshold, px")
    p.add_argument("--max-iterations", type=_positive(int), default=1000)
    p.add_argument("--confidence", type=float, default=0.999)
    p.add_argument("--min-inliers", type=_positive(int), default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="-")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("bench", help="Monte-Carlo benchmarks (CSV)", description=BENCH_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("kind", choices=("stability", "noise"))
    p.add_argument("--sweep", choices=sorted(bench.SWEEPS), default="image",
                   help="noise parameter to sweep (noise bench)")
    p.add_argument("--values", type=_nonnegative, nargs="+", help="override sweep values (px or deg)")
    p.add_argument("--motion", choices=MOTIONS, default="random")
    p.add_argument("--trials", type=_positive(int), help="default 1000 (stability) / 500 (noise)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=_positive(int), default=None,
                   help=f"worker processes (default ${bench.THREADS_ENV} or 1)")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "estimate" and not 0.0 < args.confidence < 1.0:
        ap.error("--confidence must lie in (0, 1)")
    if args.command == "synth" and not args.outliers < 1.0:
        ap.error("--outliers must lie in [0, 1)")
    if args.command in ("solve", "estimate") and not args.min_focal < args.max_focal:
        ap.error("--min-focal must be below --max-focal")
    try:
        return args.func(args)
    except Exception as exc:
        for cls, code in _ERROR_CODES:
            if isinstance(exc, cls):
                print(f"error: {exc}", file=sys.stderr)
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
