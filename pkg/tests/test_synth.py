import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ac2focal.constraints import build_M
from ac2focal.rotations import cross_matrix, imu_alignment
from ac2focal.synth import (
    MOTIONS,
    NoiseConfig,
    SceneConfig,
    add_noise,
    affine_from_homography,
    fit_homography,
    generate_scene,
    local_homography,
    project,
    transfer,
)
from ac2focal.types import Pose

from conftest import clean_scene


def scene_arrays(sc):
    acs = sc.correspondences
    return (np.array([a.x_i for a in acs]), np.array([a.x_j for a in acs]), np.array([a.A for a in acs]))


def test_determinism():
    a = generate_scene(SceneConfig(seed=11, noise=NoiseConfig(image_px=1.0, pitch_deg=0.1)))
    b = generate_scene(SceneConfig(seed=11, noise=NoiseConfig(image_px=1.0, pitch_deg=0.1)))
    for x, y in zip(scene_arrays(a), scene_arrays(b)):
        assert np.array_equal(x, y)
    assert a.imu_i == b.imu_i and a.gt_focal_px == b.gt_focal_px
    c = generate_scene(SceneConfig(seed=12))
    assert c.gt_focal_px != a.gt_focal_px


@pytest.mark.parametrize("motion", MOTIONS)
def test_motion_patterns(motion):
    for seed in range(20):
        t = clean_scene(seed=seed, motion=motion).gt_pose.t
        assert np.linalg.norm(t) == pytest.approx(1.0, abs=1e-15)
        if motion == "sideways":
            assert t[1] == 0 and t[2] == 0
        elif motion == "forward":
            assert t[0] == 0 and t[1] == 0
        elif motion == "planar":
            assert t[1] == 0


def test_scene_ranges_and_visibility():
    for seed in range(30):
        sc = generate_scene(SceneConfig(seed=seed, n_points=20))
        assert 100 <= sc.gt_focal_px <= 1000
        assert len(sc.correspondences) == 20
        R = sc.gt_pose.R
        # relative rotation built as Rx(a) Ry(b) Rz(c), |angles| <= 10 deg
        b = np.arcsin(np.clip(R[0, 2], -1, 1))
        a = np.arctan2(-R[1, 2], R[2, 2])
        c = np.arctan2(-R[0, 1], R[0, 0])
        assert np.all(np.abs(np.degrees([a, b, c])) <= 10 + 1e-9)
        for X, ac in zip(sc.points3d, sc.correspondences):
            assert -5 <= X[0] <= 5 and -5 <= X[1] <= 5 and 5 <= X[2] <= 20
            for x in (ac.x_i, ac.x_j):
                assert 0 <= x[0] <= 640 and 0 <= x[1] <= 480


def test_imu_attitudes_consistent_with_pose():
    for seed in range(20):
        sc = clean_scene(seed=seed)
        R_i, R_j = imu_alignment(sc.imu_i), imu_alignment(sc.imu_j)
        Ry = R_j @ sc.gt_pose.R @ R_i.T
        # the aligned relative rotation is a pure rotation about y
        assert np.allclose(Ry[1], [0, 1, 0], atol=1e-12)
        assert np.allclose(Ry[:, 1], [0, 1, 0], atol=1e-12)


def test_noise_free_epipolar_and_affine():
    for seed in range(20):
        sc = generate_scene(SceneConfig(seed=seed, n_points=10))
        Kinv = np.linalg.inv(sc.K)
        E = cross_matrix(sc.gt_pose.t) @ sc.gt_pose.R
        F = Kinv.T @ E @ Kinv
        for ac in sc.correspondences:
            ri, rj = Kinv @ np.append(ac.x_i, 1), Kinv @ np.append(ac.x_j, 1)
            assert abs(rj @ E @ ri) / (np.linalg.norm(ri) * np.linalg.norm(rj)) <= 1e-10
        for k in range(0, 10, 2):
            a, b = sc.correspondences[k], sc.correspondences[k + 1]
            M = build_M(a, b, sc.imu_i, sc.imu_j, sc.principal_point, scale=1.0, normalize=True)
            res = M.evaluate(sc.gt_s, 1.0 / sc.gt_focal_px) @ sc.gt_t_aligned
            assert np.max(np.abs(res)) <= 1e-9


def test_local_homography_transfers_patch():
    for seed in range(20):
        sc = generate_scene(SceneConfig(seed=seed, n_points=5))
        K = sc.K
        for X, n, H in zip(sc.points3d, sc.normals, sc.homographies):
            H2 = local_homography(X, n, sc.gt_pose, sc.gt_focal_px, sc.principal_point_true)
            assert np.allclose(H, H2)
            # four points of the plane around X
            u = np.cross(n, [1.0, 0.0, 0.0])
            u /= np.linalg.norm(u)
            v = np.cross(n, u)
            for du, dv in ((-1, -1), (1, -1), (1, 1), (-1, 1)):
                P = X + 0.05 * (du * u + dv * v)
                xi = project(K, P)
                xj = project(K, sc.gt_pose.R @ P + sc.gt_pose.t)
                assert np.max(np.abs(transfer(H, xi) - xj)) <= 1e-9


def test_local_homography_identity():
    H = local_homography((0, 0, 10), (0, 0, -1), Pose(np.eye(3), np.zeros(3)), 500.0, (320, 240))
    assert np.allclose(H / H[2, 2], np.eye(3))
    with pytest.raises(ValueError):
        local_homography((0, 0, 10), (1, 0, 0), Pose(np.eye(3), np.array([1.0, 0, 0])), 500.0, (0, 0))


def test_affine_examples():
    x = np.array([100.0, 50.0])
    assert np.allclose(affine_from_homography(np.eye(3), x, x), np.eye(2))
    H = np.array([[2.0, 0.5, 3.0], [0.1, 1.5, -2.0], [0.0, 0.0, 2.0]])
    assert np.allclose(affine_from_homography(H, x, transfer(H, x)), H[:2, :2] / 2.0)
    with pytest.raises(ValueError):
        affine_from_homography(np.array([[1, 0, 0], [0, 1, 0], [1.0, 0, -100.0]]), x, x)


def central_jacobian(H, x, h=1e-4):
    J = np.zeros((2, 2))
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        J[:, k] = (transfer(H, x + e) - transfer(H, x - e)) / (2 * h)
    return J


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_affine_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    H = np.eye(3) + 0.2 * rng.normal(size=(3, 3))
    H[2, :2] *= 1e-3
    x = rng.uniform(0, 640, size=2)
    y = transfer(H, x)
    A = affine_from_homography(H, x, y)
    J = central_jacobian(H, x)
    assert np.max(np.abs(A - J)) <= 1e-6 * np.max(np.abs(J))
    # homogeneous scale does not matter
    assert np.allclose(affine_from_homography(5 * H, x, y), A, rtol=1e-12, atol=1e-15)


def test_fit_homography_exact():
    rng = np.random.default_rng(3)
    for _ in range(20):
        H = np.eye(3) + 0.1 * rng.normal(size=(3, 3))
        H[2, :2] *= 1e-3
        src = rng.uniform(0, 640, size=(4, 2))
        dst = np.array([transfer(H, p) for p in src])
        assert np.allclose(fit_homography(src, dst), H / H[2, 2], rtol=1e-7, atol=1e-9)


def test_zero_noise_is_identity():
    sc = clean_scene(seed=4, n_points=10)
    same = add_noise(sc, NoiseConfig(), seed=1)
    for x, y in zip(scene_arrays(sc), scene_arrays(same)):
        assert np.array_equal(x, y)
    assert same.imu_i == sc.imu_i and np.array_equal(same.principal_point, sc.principal_point)


def test_image_noise_statistics():
    """Mean |displacement| per axis of N(0, 1) noise is sqrt(2/pi) ~ 0.798."""
    sc = generate_scene(SceneConfig(seed=0, n_points=2500, noise=NoiseConfig(image_px=1.0, affine=False)))
    d = np.concatenate([[a.x_i - b.x_i, a.x_j - b.x_j] for a, b in zip(sc.correspondences, sc.correspondences_true)])
    assert d.size == 10_000
    assert np.mean(np.abs(d)) == pytest.approx(np.sqrt(2 / np.pi), rel=0.05)
    assert np.std(d) == pytest.approx(1.0, rel=0.05)


def test_affine_noise_continuity():
    devs = []
    for sigma in (1.0, 0.1, 0.01, 0.001, 0.0):
        sc = generate_scene(SceneConfig(seed=5, n_points=20, noise=NoiseConfig(image_px=sigma)))
        devs.append(max(np.abs(a.A - b.A).max() for a, b in zip(sc.correspondences, sc.correspondences_true)))
    assert devs[0] > 0
    assert all(x > y for x, y in zip(devs[:-2], devs[1:-1]))
    assert devs[-1] == 0
    # first-order: deviation scales with sigma
    assert devs[3] / devs[2] == pytest.approx(0.1, rel=0.05)


def test_imu_and_principal_noise():
    base = clean_scene(seed=6)
    sc = generate_scene(SceneConfig(seed=6, n_points=2, noise=NoiseConfig(pitch_deg=0.1, roll_deg=0.2, principal_px=5.0)))
    assert sc.imu_i != sc.imu_i_true and sc.imu_j != sc.imu_j_true
    assert sc.imu_i_true == base.imu_i_true
    assert np.linalg.norm(sc.principal_point - sc.principal_point_true) == pytest.approx(5.0)
    assert sc.gt_focal_px == base.gt_focal_px


def test_common_random_numbers_across_sigma():
    a = generate_scene(SceneConfig(seed=9, n_points=5, noise=NoiseConfig(image_px=0.5, affine=False)))
    b = generate_scene(SceneConfig(seed=9, n_points=5, noise=NoiseConfig(image_px=1.0, affine=False)))
    for p, q, t in zip(a.correspondences, b.correspondences, a.correspondences_true):
        assert np.allclose(2 * (p.x_i - t.x_i), q.x_i - t.x_i)


def test_outliers():
    sc = generate_scene(SceneConfig(seed=2, n_points=200, outlier_fraction=0.3))
    assert (~sc.inliers).sum() == 60
    for ok, a, b in zip(sc.inliers, sc.correspondences, sc.correspondences_true):
        assert ok == np.array_equal(a.x_j, b.x_j)


def test_config_validation():
    with pytest.raises(ValueError):
        SceneConfig(motion="diagonal")
    with pytest.raises(ValueError):
        SceneConfig(n_points=1)
    with pytest.raises(ValueError):
        SceneConfig(outlier_fraction=1.0)
