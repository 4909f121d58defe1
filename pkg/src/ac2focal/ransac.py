"""RANSAC around the two-AC solver, scored by Sampson distance on the points."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .rotations import compose_relative_pose, cross_matrix
from .solver import SolveOptions, solve_2ac, triangulate_depth_signs
from .types import (
    AffineCorrespondence,
    DegenerateInput,
    DegenerateNullspace,
    EigenFailure,
    ImuAttitude,
    SolutionCandidate,
)

log = logging.getLogger(__name__)


class TooFewCorrespondences(ValueError):
    pass


class NoModelFound(RuntimeError):
    pass


@dataclass(frozen=True)
class RansacConfig:
    max_iterations: int = 1000
    confidence: float = 0.999
    inlier_threshold_px: float = 1.0
    min_inliers: int = 8
    seed: int = 0
    solve: SolveOptions = SolveOptions()

    def __post_init__(self):
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must lie in (0, 1)")
        if not self.inlier_threshold_px > 0:
            raise ValueError("inlier threshold must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True, eq=False)
class RobustResult:
    best: SolutionCandidate
    inlier_mask: np.ndarray
    iterations_run: int
    score: tuple  # (inlier count, -sum of truncated residuals)
    residuals: np.ndarray

    @property
    def n_inliers(self) -> int:
        return int(self.inlier_mask.sum())

    def to_dict(self) -> dict:
        return {
            "best": self.best.to_dict(),
            "inlier_mask": self.inlier_mask.astype(int).tolist(),
            "n_inliers": self.n_inliers,
            "iterations_run": self.iterations_run,
            "score": list(self.score),
        }


def fundamental_from(R, t, focal_px: float, principal_point) -> np.ndarray:
    """F = K^-T [t]x R K^-1."""
    cx, cy = principal_point
    K_inv = np.array([[1.0 / focal_px, 0.0, -cx / focal_px], [0.0, 1.0 / focal_px, -cy / focal_px], [0.0, 0.0, 1.0]])
    return K_inv.T @ cross_matrix(t) @ np.asarray(R) @ K_inv


def sampson_distance(F, x_i, x_j) -> np.ndarray:
    """First-order geometric error (pixels); vectorized over leading axes of x_i, x_j."""
    x_i = np.asarray(x_i, dtype=float)
    x_j = np.asarray(x_j, dtype=float)
    hi = np.concatenate([x_i, np.ones(x_i.shape[:-1] + (1,))], axis=-1)
    hj = np.concatenate([x_j, np.ones(x_j.shape[:-1] + (1,))], axis=-1)
    Fx = hi @ F.T
    Ftx = hj @ F
    num = np.sum(hj * Fx, axis=-1)
    den = Fx[..., 0] ** 2 + Fx[..., 1] ** 2 + Ftx[..., 0] ** 2 + Ftx[..., 1] ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.abs(num) / np.sqrt(den)
    return np.where(den > 0, d, np.where(num == 0, 0.0, np.inf))


def _residuals(cand: SolutionCandidate, pts_i, pts_j, pp) -> np.ndarray:
    F = fundamental_from(cand.pose.R, cand.pose.t, cand.focal_px, pp)
    return sampson_distance(F, pts_i, pts_j)


def _score(res: np.ndarray, thr: float):
    inl = res < thr
    return (int(inl.sum()), -float(np.minimum(res, thr).sum())), inl


def _required_iterations(w: float, confidence: float) -> float:
    p = w * w
    if p >= 1.0:
        return 0.0
    if p <= 0.0:
        return np.inf
    return np.log(1.0 - confidence) / np.log(1.0 - p)


def _majority_sign(cand: SolutionCandidate, acs, mask, imu_i, imu_j, pp) -> SolutionCandidate:
    votes = 0
    for ac, m in zip(acs, mask):
        if not m:
            continue
        for sign in (1.0, -1.0):
            try:
                d_i, d_j = triangulate_depth_signs(cand.pose.R, sign * cand.pose.t, cand.focal_px, ac, pp)
            except ValueError:
                break
            if d_i > 0 and d_j > 0:
                votes += int(sign)
                break
    if votes >= 0:
        return cand
    t_al = -cand.t_aligned
    return SolutionCandidate(
        s=cand.s,
        f_reciprocal=cand.f_reciprocal,
        pose=compose_relative_pose(cand.s, t_al, imu_i, imu_j),
        t_aligned=t_al,
        residual=cand.residual,
        cheirality_ok=cand.cheirality_ok,
        eig_residual=cand.eig_residual,
        nullspace_gap=cand.nullspace_gap,
    )


def estimate(
    acs: list[AffineCorrespondence],
    imu_i: ImuAttitude,
    imu_j: ImuAttitude,
    principal_point,
    cfg: RansacConfig | None = None,
) -> RobustResult:
    """Sample pairs, solve, keep the hypothesis with most Sampson inliers.

    Iteration k draws its pair from the k-th position of a single seeded
    stream, so runs with larger budgets extend (never alter) shorter ones.
    """
    cfg = cfg or RansacConfig()
    acs = list(acs)
    n = len(acs)
    if n < 2:
        raise TooFewCorrespondences(f"need at least 2 correspondences, got {n}")
    pp = np.asarray(principal_point, dtype=float)
    pts_i = np.array([ac.x_i for ac in acs])
    pts_j = np.array([ac.x_j for ac in acs])
    rng = np.random.default_rng(cfg.seed)

    best = None
    best_key = (-1, -np.inf)
    needed = float(cfg.max_iterations)
    it = 0
    while it < cfg.max_iterations and it < needed:
        a, b = rng.choice(n, size=2, replace=False)
        it += 1
        try:
            cands = solve_2ac(acs[a], acs[b], imu_i, imu_j, pp, cfg.solve)
        except (DegenerateInput, DegenerateNullspace, EigenFailure):
            continue
        for cand in cands:
            key, _ = _score(_residuals(cand, pts_i, pts_j, pp), cfg.inlier_threshold_px)
            if key > best_key:
                best_key, best = key, cand
                needed = _required_iterations(key[0] / n, cfg.confidence)

    if best is None or best_key[0] < cfg.min_inliers:
        raise NoModelFound(f"best model has {max(best_key[0], 0)} inliers after {it} iterations "
                           f"(need {cfg.min_inliers})")
    res = _residuals(best, pts_i, pts_j, pp)
    key, mask = _score(res, cfg.inlier_threshold_px)
    best = _majority_sign(best, acs, mask, imu_i, imu_j, pp)
    log.debug("ransac: %d inliers / %d after %d iterations", key[0], n, it)
    return RobustResult(best=best, inlier_mask=mask, iterations_run=it, score=key, residuals=res)
