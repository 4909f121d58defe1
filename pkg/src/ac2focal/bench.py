"""Monte-Carlo benchmarks on synthetic scenes.

Trial k of a run uses scene seed ``seed * 1_000_003 + k`` for every sweep
value, so curves over a noise sweep share scenes and underlying noise draws.
Under noise, each trial keeps the candidate closest to ground truth.
"""
from __future__ import annotations

import csv
import io
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .metrics import focal_error, rotation_error, stability_metrics, translation_error
from .solver import SolveOptions, solve_2ac
from .synth import NoiseConfig, SceneConfig, generate_scene
from .types import DegenerateInput, DegenerateNullspace, EigenFailure

log = logging.getLogger(__name__)

METRICS = ("eps_f", "eps_R", "eps_t", "xi_f", "xi_R", "xi_t")
CSV_COLUMNS = ("sweep_value", "metric", "median", "q25", "q75")
SWEEPS = {
    "image": ("image_px", [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]),
    "pitch": ("pitch_deg", [0.0, 0.02, 0.04, 0.06, 0.08, 0.10, 0.12, 0.14, 0.16, 0.18, 0.20]),
    "roll": ("roll_deg", [0.0, 0.02, 0.04, 0.06, 0.08, 0.10, 0.12, 0.14, 0.16, 0.18, 0.20]),
    "principal": ("principal_px", [float(v) for v in range(0, 21, 2)]),
}
THREADS_ENV = "AC2FOCAL_THREADS"


@dataclass(frozen=True)
class TrialResult:
    ok: bool
    errors: tuple = ()  # ordered as METRICS
    degenerate: bool = False


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def trial_seed(seed: int, k: int) -> int:
    return seed * 1_000_003 + k


def run_trial(cfg: SceneConfig, opts: SolveOptions | None = None) -> TrialResult:
    scene = generate_scene(replace(cfg, n_points=2))
    a, b = scene.correspondences
    try:
        cands = solve_2ac(a, b, scene.imu_i, scene.imu_j, scene.principal_point, opts)
    except (DegenerateInput, DegenerateNullspace, EigenFailure) as exc:
        log.debug("trial seed %d: %s", cfg.seed, exc)
        return TrialResult(ok=False, degenerate=True)
    if not cands:
        return TrialResult(ok=False)
    R_gt, t_gt, f_gt = scene.gt_pose.R, scene.gt_pose.t, scene.gt_focal_px
    rows = []
    for c in cands:
        xi = stability_metrics(c.pose.R, c.pose.t, c.focal_px, R_gt, t_gt, f_gt)
        eps = (
            focal_error(c.focal_px, f_gt),
            rotation_error(c.pose.R, R_gt),
            translation_error(c.pose.t, t_gt),
        )
        rows.append(eps + xi)
    best = min(rows, key=lambda r: r[3] + r[4] + r[5])
    return TrialResult(ok=True, errors=tuple(float(v) for v in best))


def _run_one(args):
    cfg, opts = args
    return run_trial(cfg, opts)


def run_trials(cfgs, opts: SolveOptions | None = None, jobs: int | None = None) -> list[TrialResult]:
    jobs = jobs or default_jobs()
    work = [(c, opts) for c in cfgs]
    if jobs <= 1:
        return [_run_one(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(_run_one, work, chunksize=16))


def summarize(results, sweep_value: float) -> list[dict]:
    good = np.array([r.errors for r in results if r.ok])
    rows = []
    for m, name in enumerate(METRICS):
        col = good[:, m] if len(good) else np.array([np.nan])
        q25, med, q75 = np.percentile(col, [25, 50, 75])
        rows.append({"sweep_value": sweep_value, "metric": name, "median": med, "q25": q25, "q75": q75})
    return rows


def stability_bench(trials: int = 1000, motion: str = "random", seed: int = 0, jobs: int | None = None,
                    opts: SolveOptions | None = None):
    """Noise-free trials; returns (summary rows, raw results)."""
    cfgs = [SceneConfig(motion=motion, seed=trial_seed(seed, k)) for k in range(trials)]
    results = run_trials(cfgs, opts, jobs)
    return summarize(results, 0.0), results


def noise_bench(sweep: str = "image", values=None, trials: int = 500, motion: str = "random", seed: int = 0,
                base_noise: NoiseConfig | None = None, jobs: int | None = None, opts: SolveOptions | None = None):
    """Sweep one noise parameter. IMU sweeps fix image noise at 1 px unless ``base_noise`` says otherwise."""
    if sweep not in SWEEPS:
        raise ValueError(f"sweep must be one of {sorted(SWEEPS)}")
    field_name, default_values = SWEEPS[sweep]
    values = default_values if values is None else list(values)
    if base_noise is None:
        base_noise = NoiseConfig(image_px=1.0) if sweep in ("pitch", "roll") else NoiseConfig()
    rows, raw = [], {}
    for v in values:
        noise = replace(base_noise, **{field_name: float(v)})
        cfgs = [SceneConfig(motion=motion, noise=noise, seed=trial_seed(seed, k)) for k in range(trials)]
        res = run_trials(cfgs, opts, jobs)
        raw[float(v)] = res
        n_fail = sum(not r.ok for r in res)
        if n_fail:
            log.info("%s=%g: %d/%d trials without a candidate", sweep, v, n_fail, trials)
        rows.extend(summarize(res, float(v)))
    return rows, raw


def to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(float(r[k])) if k != "metric" else r[k]) for k in CSV_COLUMNS})
    return buf.getvalue()
