import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ac2focal import DegenerateInput, DegenerateNullspace, ImuAttitude, SolveOptions, solve_2ac
from ac2focal.constraints import build_M, determinant_system, system_residual
from ac2focal.rotations import rot_y
from ac2focal.solver import normalization_scale, triangulate_depth_signs
from ac2focal.synth import MOTIONS, affine_from_homography, project
from ac2focal.types import AffineCorrespondence

from conftest import clean_scene


def root_error(cands, sc):
    return min(max(abs(c.s - sc.gt_s), abs(c.focal_px - sc.gt_focal_px) / sc.gt_focal_px) for c in cands)


@pytest.mark.parametrize("motion", MOTIONS)
def test_noise_free_recovery(motion):
    for seed in range(25):
        sc = clean_scene(seed=seed, motion=motion)
        cands = solve_2ac(*sc.correspondences, sc.imu_i, sc.imu_j, sc.principal_point)
        assert root_error(cands, sc) <= 1e-8
        best = cands[0]
        assert abs(best.s - sc.gt_s) <= 1e-8
        assert abs(best.t_aligned @ sc.gt_t_aligned) >= 1 - 1e-9


def test_candidates_are_roots_and_sorted():
    for seed in range(20):
        sc = clean_scene(seed=seed)
        a, b = sc.correspondences
        cands = solve_2ac(a, b, sc.imu_i, sc.imu_j, sc.principal_point)
        scale = normalization_scale((a, b), sc.principal_point)
        systems = [determinant_system(build_M(p, q, sc.imu_i, sc.imu_j, sc.principal_point, scale=scale))
                   for p, q in ((a, b), (b, a))]
        for c in cands:
            # a root of the row assignment that produced it
            assert min(system_residual(gs, c.s, scale / c.focal_px) for gs in systems) <= 1e-6
            c.pose.check()
            assert np.linalg.norm(c.t_aligned) == pytest.approx(1.0)
        keys = [(c.residual, not c.cheirality_ok, c.eig_residual) for c in cands]
        assert keys == sorted(keys)


def test_returned_poses_satisfy_epipolar_constraint():
    for seed in range(20):
        sc = clean_scene(seed=seed)
        for c in solve_2ac(*sc.correspondences, sc.imu_i, sc.imu_j, sc.principal_point):
            Kinv = np.linalg.inv(np.array([[c.focal_px, 0, sc.principal_point[0]],
                                           [0, c.focal_px, sc.principal_point[1]], [0, 0, 1]]))
            for ac in sc.correspondences:
                ri = Kinv @ np.append(ac.x_i, 1)
                rj = Kinv @ np.append(ac.x_j, 1)
                ri, rj = ri / np.linalg.norm(ri), rj / np.linalg.norm(rj)
                assert abs(rj @ np.cross(c.pose.t, c.pose.R @ ri)) <= 1e-6


def test_swapping_correspondences_keeps_best():
    for seed in range(20):
        sc = clean_scene(seed=seed)
        a, b = sc.correspondences
        c1 = solve_2ac(a, b, sc.imu_i, sc.imu_j, sc.principal_point)[0]
        c2 = solve_2ac(b, a, sc.imu_i, sc.imu_j, sc.principal_point)[0]
        assert c2.s == pytest.approx(c1.s, rel=1e-6, abs=1e-12)
        assert c2.focal_px == pytest.approx(c1.focal_px, rel=1e-6)


def test_single_row_assignment_still_recovers():
    opts = SolveOptions(run_both_row_assignments=False)
    for seed in range(10):
        sc = clean_scene(seed=seed)
        cands = solve_2ac(*sc.correspondences, sc.imu_i, sc.imu_j, sc.principal_point, opts)
        assert root_error(cands, sc) <= 1e-8


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_focal_window_keeps_ground_truth(seed):
    sc = clean_scene(seed=seed, focal_range=(100.0, 1000.0))
    cands = solve_2ac(*sc.correspondences, sc.imu_i, sc.imu_j, sc.principal_point)
    assert root_error(cands, sc) <= 1e-8


def test_focal_window_filters():
    sc = clean_scene(seed=2)
    f = sc.gt_focal_px
    opts = SolveOptions(min_focal_px=f * 1.01, max_focal_px=f * 100)
    cands = solve_2ac(*sc.correspondences, sc.imu_i, sc.imu_j, sc.principal_point, opts)
    assert all(c.focal_px >= f * 1.01 for c in cands)
    with pytest.raises(ValueError):
        SolveOptions(min_focal_px=10, max_focal_px=5)


def test_triangulation_depths():
    for seed in range(10):
        sc = clean_scene(seed=seed)
        R, t = sc.gt_pose.R, sc.gt_pose.t
        for X, ac in zip(sc.points3d, sc.correspondences):
            zi, zj = triangulate_depth_signs(R, t, sc.gt_focal_px, ac, sc.principal_point)
            assert zi == pytest.approx(X[2], rel=1e-2)
            assert zj == pytest.approx((R @ X + t)[2], rel=1e-2)
            zi, zj = triangulate_depth_signs(R, -t, sc.gt_focal_px, ac, sc.principal_point)
            assert zi < 0 or zj < 0


def test_triangulation_parallel_rays():
    ac = AffineCorrespondence((100.0, 50.0), (100.0, 50.0), np.eye(2))
    with pytest.raises(ValueError):
        triangulate_depth_signs(np.eye(3), np.array([0.0, 0.0, 1.0]), 500.0, ac, (0.0, 0.0))


def test_shared_point_rejected():
    sc = clean_scene(seed=0)
    a = sc.correspondences[0]
    with pytest.raises(DegenerateInput):
        solve_2ac(a, a, sc.imu_i, sc.imu_j, sc.principal_point)


def test_singular_affine_rejected():
    sc = clean_scene(seed=0)
    a, b = sc.correspondences
    bad = AffineCorrespondence(a.x_i, a.x_j, np.zeros((2, 2)))
    with pytest.raises(DegenerateInput):
        solve_2ac(bad, b, sc.imu_i, sc.imu_j, sc.principal_point)


@pytest.mark.parametrize("seed", range(30))
def test_pure_rotation_flagged(seed):
    rng = np.random.default_rng(seed)
    focal = rng.uniform(100, 1000)
    pp = np.array([320.0, 240.0])
    K = np.array([[focal, 0, pp[0]], [0, focal, pp[1]], [0, 0, 1]])
    R = rot_y(np.deg2rad(rng.uniform(-10, 10)))
    H = K @ R @ np.linalg.inv(K)
    acs = []
    for _ in range(2):
        X = np.array([*rng.uniform(-2, 2, 2), rng.uniform(5, 20)])
        x_i, x_j = project(K, X), project(K, R @ X)
        acs.append(AffineCorrespondence(x_i, x_j, affine_from_homography(H, x_i, x_j)))
    with pytest.raises(DegenerateNullspace):
        solve_2ac(*acs, ImuAttitude(), ImuAttitude(), pp)


def test_candidate_serialization():
    sc = clean_scene(seed=1)
    d = solve_2ac(*sc.correspondences, sc.imu_i, sc.imu_j, sc.principal_point)[0].to_dict()
    assert {"theta_deg", "focal_px", "R", "t"} <= set(d)
