"""Pose / focal error measures and the noise-free stability measures."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ErrorReport:
    rot_err_deg: float
    trans_err_deg: float
    focal_rel_err: float
    xi_f: float
    xi_R: float
    xi_t: float


def rotation_error(R, R_gt) -> float:
    """Angle of R_gt R^T in degrees."""
    c = (np.trace(np.asarray(R_gt) @ np.asarray(R).T) - 1.0) / 2.0
    return float(np.degrees(np.arccos(np.clip(c, -1.0, 1.0))))


def translation_error(t, t_gt, sign_agnostic: bool = False) -> float:
    t = np.asarray(t, dtype=float)
    t_gt = np.asarray(t_gt, dtype=float)
    n, n_gt = np.linalg.norm(t), np.linalg.norm(t_gt)
    if n == 0 or n_gt == 0:
        raise ValueError("translation direction undefined for a zero vector")
    ang = float(np.degrees(np.arccos(np.clip(t @ t_gt / (n * n_gt), -1.0, 1.0))))
    return min(ang, 180.0 - ang) if sign_agnostic else ang


def focal_error(f_est_px: float, f_gt_px: float) -> float:
    return abs(f_gt_px - f_est_px) / f_gt_px


def stability_metrics(R, t, focal_px, R_gt, t_gt, focal_gt_px):
    """(xi_f, xi_R, xi_t). The sign of t is aligned to t_gt before differencing."""
    xi_f = focal_error(focal_px, focal_gt_px)
    xi_R = float(np.linalg.norm(np.asarray(R_gt) - np.asarray(R), "fro"))
    u = np.asarray(t, dtype=float) / np.linalg.norm(t)
    u_gt = np.asarray(t_gt, dtype=float) / np.linalg.norm(t_gt)
    xi_t = float(min(np.linalg.norm(u_gt - u), np.linalg.norm(u_gt + u)))
    return xi_f, xi_R, xi_t


def error_report(candidate, R_gt, t_gt, focal_gt_px) -> ErrorReport:
    R, t, f = candidate.pose.R, candidate.pose.t, candidate.focal_px
    xi_f, xi_R, xi_t = stability_metrics(R, t, f, R_gt, t_gt, focal_gt_px)
    return ErrorReport(
        rot_err_deg=rotation_error(R, R_gt),
        trans_err_deg=translation_error(t, t_gt),
        focal_rel_err=focal_error(f, focal_gt_px),
        xi_f=xi_f, xi_R=xi_R, xi_t=xi_t,
    )
