"""Synthetic two-view scenes with affine correspondences and IMU attitudes.

Points are drawn in a box in front of view i, each with a small local plane
whose induced homography yields the ground-truth affine matrix. Noise is drawn
from a dedicated stream and scaled by the configured sigmas, so scenes that
differ only in sigma share the same underlying draws.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .rotations import (
    attitude_from_gravity,
    imu_alignment,
    rot_x,
    rot_y,
    rot_z,
    s_from_rotation,
)
from .types import AffineCorrespondence, ImuAttitude, Pose

MOTIONS = ("random", "planar", "sideways", "forward")


@dataclass(frozen=True)
class NoiseConfig:
    image_px: float = 0.0
    pitch_deg: float = 0.0
    roll_deg: float = 0.0
    principal_px: float = 0.0
    affine: bool = True


@dataclass(frozen=True)
class SceneConfig:
    n_points: int = 100
    cube_xy: tuple = (-5.0, 5.0)
    cube_z: tuple = (5.0, 20.0)
    image_size: tuple = (640, 480)
    principal_point: tuple = (320.0, 240.0)
    focal_range: tuple = (100.0, 1000.0)
    rotation_range_deg: float = 10.0
    motion: str = "random"
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    outlier_fraction: float = 0.0
    patch_half_px: float = 10.0
    max_normal_tilt_deg: float = 45.0
    seed: int = 0

    def __post_init__(self):
        if self.motion not in MOTIONS:
            raise ValueError(f"motion must be one of {MOTIONS}, got {self.motion!r}")
        if self.n_points < 2:
            raise ValueError("need at least two points")
        if not 0.0 <= self.outlier_fraction < 1.0:
            raise ValueError("outlier_fraction must lie in [0, 1)")


@dataclass(frozen=True, eq=False)
class SyntheticScene:
    config: SceneConfig
    gt_focal_px: float
    gt_pose: Pose
    gt_s: float
    gt_t_aligned: np.ndarray
    imu_i_true: ImuAttitude
    imu_j_true: ImuAttitude
    imu_i: ImuAttitude
    imu_j: ImuAttitude
    principal_point_true: np.ndarray
    principal_point: np.ndarray  # what the solver is told
    points3d: np.ndarray
    normals: np.ndarray
    homographies: np.ndarray
    correspondences_true: tuple
    correspondences: tuple
    inliers: np.ndarray

    @property
    def K(self) -> np.ndarray:
        return _K(self.gt_focal_px, self.principal_point_true)


def _K(focal_px, pp) -> np.ndarray:
    return np.array([[focal_px, 0.0, pp[0]], [0.0, focal_px, pp[1]], [0.0, 0.0, 1.0]])


def project(K: np.ndarray, X) -> np.ndarray:
    x = K @ np.asarray(X, dtype=float)
    return x[:2] / x[2]


def local_homography(point3d, plane_normal, pose: Pose, focal_px: float, principal_point) -> np.ndarray:
    """Pixel homography i -> j induced by the plane through ``point3d`` with normal ``plane_normal``
    (view-i coordinates)."""
    X = np.asarray(point3d, dtype=float)
    n = np.asarray(plane_normal, dtype=float)
    n = n / np.linalg.norm(n)
    d = n @ X
    c_j = -pose.R.T @ pose.t
    if abs(d) <= 1e-9 * np.linalg.norm(X) or abs(n @ c_j - d) <= 1e-9 * max(1.0, abs(d)):
        raise ValueError("plane passes through a camera center")
    K = _K(focal_px, principal_point)
    return K @ (pose.R + np.outer(pose.t, n) / d) @ np.linalg.inv(K)


def transfer(H: np.ndarray, x) -> np.ndarray:
    y = H @ np.append(np.asarray(x, dtype=float), 1.0)
    return y[:2] / y[2]


def affine_from_homography(H, x_i, x_j) -> np.ndarray:
    """First-order (Jacobian) approximation of ``H`` at ``x_i``; ``x_j`` is its image."""
    H = np.asarray(H, dtype=float)
    u_i, v_i = x_i
    u_j, v_j = x_j
    b = u_i * H[2, 0] + v_i * H[2, 1] + H[2, 2]
    if abs(b) <= 1e-12:
        raise ValueError("point maps to infinity under H (b ~ 0)")
    return np.array([
        [H[0, 0] - H[2, 0] * u_j, H[0, 1] - H[2, 1] * u_j],
        [H[1, 0] - H[2, 0] * v_j, H[1, 1] - H[2, 1] * v_j],
    ]) / b


def fit_homography(src, dst) -> np.ndarray:
    """Normalized DLT from >= 4 point pairs."""
    src = np.asarray(src, dtype=float)
    dst = np.asarray(dst, dtype=float)

    def norm_T(p):
        c = p.mean(axis=0)
        d = np.sqrt(((p - c) ** 2).sum(axis=1)).mean()
        k = np.sqrt(2.0) / d
        return np.array([[k, 0, -k * c[0]], [0, k, -k * c[1]], [0, 0, 1.0]])

    Ts, Td = norm_T(src), norm_T(dst)
    ps = (Ts @ np.column_stack([src, np.ones(len(src))]).T).T
    pd = (Td @ np.column_stack([dst, np.ones(len(dst))]).T).T
    rows = []
    for (x, y, w), (u, v, z) in zip(ps, pd):
        rows.append([0, 0, 0, -z * x, -z * y, -z * w, v * x, v * y, v * w])
        rows.append([z * x, z * y, z * w, 0, 0, 0, -u * x, -u * y, -u * w])
    _, _, Vt = np.linalg.svd(np.asarray(rows))
    Hn = Vt[-1].reshape(3, 3)
    H = np.linalg.inv(Td) @ Hn @ Ts
    return H / H[2, 2]


def _translation(motion: str, rng: np.random.Generator) -> np.ndarray:
    if motion == "random":
        t = rng.normal(size=3)
    elif motion == "planar":
        a = rng.uniform(0, 2 * np.pi)
        t = np.array([np.cos(a), 0.0, np.sin(a)])
    elif motion == "sideways":
        t = np.array([rng.choice([-1.0, 1.0]), 0.0, 0.0])
    else:
        t = np.array([0.0, 0.0, rng.choice([-1.0, 1.0])])
    return t / np.linalg.norm(t)


def _cap_normal(rng: np.random.Generator, max_tilt: float) -> np.ndarray:
    cos_t = rng.uniform(np.cos(max_tilt), 1.0)
    sin_t = np.sqrt(1.0 - cos_t**2)
    phi = rng.uniform(0, 2 * np.pi)
    return np.array([sin_t * np.cos(phi), sin_t * np.sin(phi), -cos_t])


def _in_image(x, size) -> bool:
    return 0.0 <= x[0] <= size[0] and 0.0 <= x[1] <= size[1]


def generate_scene(cfg: SceneConfig) -> SyntheticScene:
    """Deterministic in ``cfg.seed``."""
    scene_seed, noise_seed, outlier_seed = np.random.SeedSequence(cfg.seed).spawn(3)
    rng = np.random.default_rng(scene_seed)
    rr = np.deg2rad(cfg.rotation_range_deg)

    focal = float(rng.uniform(*cfg.focal_range))
    R = rot_x(rng.uniform(-rr, rr)) @ rot_y(rng.uniform(-rr, rr)) @ rot_z(rng.uniform(-rr, rr))
    t = _translation(cfg.motion, rng)
    pose = Pose(R, t)
    imu_i = ImuAttitude(roll=float(rng.uniform(-rr, rr)), pitch=float(rng.uniform(-rr, rr)))
    g_i = imu_alignment(imu_i).T @ np.array([0.0, 1.0, 0.0])
    imu_j = attitude_from_gravity(R @ g_i)
    R_i, R_j = imu_alignment(imu_i), imu_alignment(imu_j)
    gt_s = s_from_rotation(R_j @ R @ R_i.T)
    gt_t_aligned = R_j @ t

    pp = np.asarray(cfg.principal_point, dtype=float)
    K = _K(focal, pp)
    max_tilt = np.deg2rad(cfg.max_normal_tilt_deg)
    pts, normals, Hs, acs = [], [], [], []
    while len(pts) < cfg.n_points:
        X = np.array([rng.uniform(*cfg.cube_xy), rng.uniform(*cfg.cube_xy), rng.uniform(*cfg.cube_z)])
        Xj = R @ X + t
        if Xj[2] <= 0:
            continue
        x_i, x_j = project(K, X), project(K, Xj)
        if not (_in_image(x_i, cfg.image_size) and _in_image(x_j, cfg.image_size)):
            continue
        n = _cap_normal(rng, max_tilt)
        if abs(n @ X) < 0.1 * np.linalg.norm(X):
            continue
        H = local_homography(X, n, pose, focal, pp)
        A = affine_from_homography(H, x_i, x_j)
        if abs(np.linalg.det(A)) <= 1e-6:
            continue
        pts.append(X)
        normals.append(n)
        Hs.append(H)
        acs.append(AffineCorrespondence(x_i, x_j, A))

    scene = SyntheticScene(
        config=cfg,
        gt_focal_px=focal,
        gt_pose=pose,
        gt_s=gt_s,
        gt_t_aligned=gt_t_aligned,
        imu_i_true=imu_i,
        imu_j_true=imu_j,
        imu_i=imu_i,
        imu_j=imu_j,
        principal_point_true=pp,
        principal_point=pp,
        points3d=np.array(pts),
        normals=np.array(normals),
        homographies=np.array(Hs),
        correspondences_true=tuple(acs),
        correspondences=tuple(acs),
        inliers=np.ones(cfg.n_points, dtype=bool),
    )
    scene = add_noise(scene, cfg.noise, noise_seed)
    if cfg.outlier_fraction > 0:
        scene = inject_outliers(scene, cfg.outlier_fraction, outlier_seed)
    return scene


def add_noise(scene: SyntheticScene, noise: NoiseConfig, seed=None) -> SyntheticScene:
    """Corrupt measurements (points, affine matrices, reported IMU, principal point).

    Ground truth is untouched. The number and order of random draws does not
    depend on the sigmas.
    """
    rng = np.random.default_rng(seed)
    n = len(scene.correspondences_true)
    h = scene.config.patch_half_px
    corners = np.array([[-h, -h], [h, -h], [h, h], [-h, h]])

    d_pts = rng.normal(size=(n, 2, 2))
    d_corners = rng.normal(size=(n, 2, 4, 2))
    d_imu = rng.normal(size=(2, 2))
    pp_dir = rng.uniform(0, 2 * np.pi)

    sig = noise.image_px
    acs = []
    for k, ac in enumerate(scene.correspondences_true):
        if sig == 0:
            acs.append(ac)
            continue
        x_i = ac.x_i + sig * d_pts[k, 0]
        x_j = ac.x_j + sig * d_pts[k, 1]
        A = ac.A
        if noise.affine:
            H = scene.homographies[k]
            src = ac.x_i + corners
            dst = np.array([transfer(H, c) for c in src])
            H_fit = fit_homography(src + sig * d_corners[k, 0], dst + sig * d_corners[k, 1])
            A = affine_from_homography(H_fit, x_i, x_j)
        acs.append(AffineCorrespondence(x_i, x_j, A))

    roll_s = np.deg2rad(noise.roll_deg)
    pitch_s = np.deg2rad(noise.pitch_deg)
    imu_i = ImuAttitude(scene.imu_i_true.roll + roll_s * d_imu[0, 0], scene.imu_i_true.pitch + pitch_s * d_imu[0, 1])
    imu_j = ImuAttitude(scene.imu_j_true.roll + roll_s * d_imu[1, 0], scene.imu_j_true.pitch + pitch_s * d_imu[1, 1])
    pp = scene.principal_point_true + noise.principal_px * np.array([np.cos(pp_dir), np.sin(pp_dir)])

    return replace(scene, correspondences=tuple(acs), imu_i=imu_i, imu_j=imu_j, principal_point=pp)


def inject_outliers(scene: SyntheticScene, fraction: float, seed=None) -> SyntheticScene:
    """Replace a fraction of correspondences by uniform random points and random affine matrices."""
    rng = np.random.default_rng(seed)
    n = len(scene.correspondences)
    k = int(round(fraction * n))
    idx = rng.choice(n, size=k, replace=False)
    w, hgt = scene.config.image_size
    acs = list(scene.correspondences)
    inliers = scene.inliers.copy()
    for i in idx:
        x_i = acs[i].x_i
        x_j = np.array([rng.uniform(0, w), rng.uniform(0, hgt)])
        while True:
            A = rng.normal(scale=0.5, size=(2, 2)) + np.eye(2)
            if abs(np.linalg.det(A)) > 0.1:
                break
        acs[i] = AffineCorrespondence(x_i, x_j, A)
        inliers[i] = False
    return replace(scene, correspondences=tuple(acs), inliers=inliers)
