"""Minimal solver: two affine correspondences + IMU roll/pitch -> ranked
(theta, focal, R, t) hypotheses."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import polyeig
from .constraints import (
    build_M,
    coefficient_matrix,
    determinant_system,
    normalized_grids,
    polish_root,
    rescue_root,
    system_residual,
)
from .rotations import compose_relative_pose
from .types import (
    AffineCorrespondence,
    DegenerateInput,
    DegenerateNullspace,
    ImuAttitude,
    SolutionCandidate,
)

log = logging.getLogger(__name__)

RESCUED_DEGENERATE_TOL = 1e-5


@dataclass(frozen=True)
class SolveOptions:
    run_both_row_assignments: bool = True
    tol_consistency: float = 1e-4
    min_focal_px: float = 50.0
    max_focal_px: float = 10000.0
    require_cheirality: bool = True
    balance: bool = True
    polish: bool = True
    rescue_multiple_roots: bool = True

    def __post_init__(self):
        if not 0 < self.min_focal_px < self.max_focal_px:
            raise ValueError("need 0 < min_focal_px < max_focal_px")


def normalization_scale(acs, principal_point) -> float:
    pp = np.asarray(principal_point, dtype=float)
    pts = np.concatenate([[ac.x_i - pp, ac.x_j - pp] for ac in acs])
    return max(1.0, float(np.max(np.abs(pts))))


def check_pair(ac_a: AffineCorrespondence, ac_b: AffineCorrespondence, tol: float = 1e-9) -> None:
    for ac in (ac_a, ac_b):
        if not ac.is_valid():
            raise DegenerateInput("affine correspondence is non-finite or has singular A")
    if np.allclose(ac_a.x_i, ac_b.x_i, rtol=0, atol=tol) or np.allclose(ac_a.x_j, ac_b.x_j, rtol=0, atol=tol):
        raise DegenerateInput("the two correspondences share a point")


def triangulate_depth_signs(R, t, focal_px: float, ac: AffineCorrespondence, principal_point):
    """Signed depths of the midpoint-triangulated point in views i and j."""
    pp = np.asarray(principal_point, dtype=float)
    R = np.asarray(R, dtype=float)
    t = np.asarray(t, dtype=float)
    d_i = np.append((ac.x_i - pp) / focal_px, 1.0)
    d_j = R.T @ np.append((ac.x_j - pp) / focal_px, 1.0)
    c_j = -R.T @ t
    cos = d_i @ d_j / (np.linalg.norm(d_i) * np.linalg.norm(d_j))
    if np.arccos(np.clip(cos, -1.0, 1.0)) < 1e-6:
        raise ValueError("viewing rays are (nearly) parallel")
    # least squares for lam_i d_i - lam_j d_j = c_j
    a, b, c = d_i @ d_i, d_i @ d_j, d_j @ d_j
    p, q = d_i @ c_j, d_j @ c_j
    det = a * c - b * b
    lam = ((c * p - b * q) / det, (b * p - a * q) / det)
    X = 0.5 * (lam[0] * d_i + c_j + lam[1] * d_j)
    return float(X[2]), float((R @ X + t)[2])


def _fix_sign(pose_R, t, focal_px, acs, pp):
    """Return (sign, ok): the sign of t putting every point in front of both cameras."""
    for sign in (1.0, -1.0):
        try:
            depths = [triangulate_depth_signs(pose_R, sign * t, focal_px, ac, pp) for ac in acs]
        except ValueError:
            return 1.0, False
        if all(d_i > 0 and d_j > 0 for d_i, d_j in depths):
            return sign, True
    return 1.0, False


def _eigen_candidates(M, opts: SolveOptions, f_range=(1e-8, np.inf)):
    gs = determinant_system(M)
    C = coefficient_matrix(*gs)
    pencil = polyeig.linearize(polyeig.to_matrix_polynomial(C))
    pairs = polyeig.solve_pencil(pencil, balance=opts.balance)
    found = []
    grids = None
    for s, L, res in pairs:
        kept = polyeig.filter_solutions([(s, L)], opts.tol_consistency)
        if kept:
            found.append((kept[0][0], kept[0][1], res, False))
        elif opts.rescue_multiple_roots:
            grids = normalized_grids(gs) if grids is None else grids
            hit = rescue_root(grids, s, f_range)
            if hit is not None:
                found.append((hit[0], hit[1], res, True))
    return gs, found


def _dedupe(cands, tol: float = 1e-6):
    out = []
    for c in sorted(cands, key=lambda c: c[2]):
        s, f = c[0], c[1]
        if any(abs(s - o[0]) < tol and abs(f - o[1]) < tol * abs(f) for o in out):
            continue
        out.append(c)
    return out


def solve_2ac(
    ac_a: AffineCorrespondence,
    ac_b: AffineCorrespondence,
    imu_i: ImuAttitude,
    imu_j: ImuAttitude,
    principal_point=(0.0, 0.0),
    opts: SolveOptions | None = None,
) -> list[SolutionCandidate]:
    """All admissible hypotheses, best first.

    Ranking: normalized polynomial residual (max over the row assignments
    that were run), then cheirality, then pencil residual.
    """
    opts = opts or SolveOptions()
    check_pair(ac_a, ac_b)
    pp = np.asarray(principal_point, dtype=float)
    scale = normalization_scale((ac_a, ac_b), pp)

    orders = [(ac_a, ac_b), (ac_b, ac_a)] if opts.run_both_row_assignments else [(ac_a, ac_b)]
    systems = []
    raw = []
    for k, (a, b) in enumerate(orders):
        M = build_M(a, b, imu_i, imu_j, pp, scale=scale)
        # rescue only inside the focal window, with slack for polishing
        f_range = (0.5 * scale / opts.max_focal_px, 2.0 * scale / opts.min_focal_px)
        gs, found = _eigen_candidates(M, opts, f_range)
        systems.append((M, normalized_grids(gs)))
        raw.extend((s, f, res, k, rescued) for s, f, res, rescued in found)

    n_degenerate = 0
    out = []
    for s, f, eig_res, k, rescued in _dedupe(raw):
        M = systems[k][0]
        if opts.polish:
            s, f = polish_root(systems[k][1], s, f)
        if not f > 0:
            continue
        focal = scale / f
        if not opts.min_focal_px <= focal <= opts.max_focal_px:
            continue
        try:
            # multiple roots are only accurate to about eps^(1/3)
            t_al, gap = polyeig.recover_translation(M, s, f, RESCUED_DEGENERATE_TOL if rescued else 1e-8)
        except DegenerateNullspace:
            n_degenerate += 1
            continue
        residual = max(system_residual(gs, s, f) for _, gs in systems)
        pose = compose_relative_pose(s, t_al, imu_i, imu_j)
        sign, ok = _fix_sign(pose.R, pose.t, focal, (ac_a, ac_b), pp)
        if not ok and opts.require_cheirality:
            continue
        if sign < 0:
            t_al = -t_al
            pose = compose_relative_pose(s, t_al, imu_i, imu_j)
        out.append(
            SolutionCandidate(
                s=s,
                f_reciprocal=1.0 / focal,
                pose=pose,
                t_aligned=t_al,
                residual=residual,
                cheirality_ok=ok,
                eig_residual=eig_res,
                nullspace_gap=gap,
            )
        )
    if n_degenerate:
        # a root where M drops to rank <= 1 explains the data without a baseline
        raise DegenerateNullspace(f"{n_degenerate} root(s) have a degenerate translation null space")
    out.sort(key=lambda c: (c.residual, not c.cheirality_ok, c.eig_residual))
    return out
