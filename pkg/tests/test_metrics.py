import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from ac2focal.metrics import (
    error_report,
    focal_error,
    rotation_error,
    stability_metrics,
    translation_error,
)
from ac2focal.solver import solve_2ac

from conftest import clean_scene

quats = st.tuples(*[st.floats(-1, 1)] * 4).filter(lambda q: np.linalg.norm(q) > 0.1)


def rot(q):
    return Rotation.from_quat(q).as_matrix()


def test_rotation_error_examples(rng):
    R = rot(rng.normal(size=4))
    assert rotation_error(R, R) == pytest.approx(0.0, abs=1e-6)
    for _ in range(20):
        axis = rng.normal(size=3)
        extra = Rotation.from_rotvec(np.deg2rad(10) * axis / np.linalg.norm(axis)).as_matrix()
        assert rotation_error(R @ extra, R) == pytest.approx(10.0, abs=1e-9)
    assert rotation_error(R @ np.diag([1, -1, -1]), R) == pytest.approx(180.0)


@settings(max_examples=200)
@given(quats, quats, quats)
def test_rotation_error_symmetric_and_left_invariant(q1, q2, q3):
    A, B, C = rot(q1), rot(q2), rot(q3)
    e = rotation_error(A, B)
    assert 0 <= e <= 180
    # arccos near 0 turns 1e-16 roundoff into ~1e-6 deg
    assert rotation_error(B, A) == pytest.approx(e, abs=1e-5)
    assert rotation_error(C @ A, C @ B) == pytest.approx(e, abs=1e-5)


def test_translation_error_examples():
    t = np.array([0.3, -0.2, 0.9])
    assert translation_error(t, t) == pytest.approx(0.0, abs=1e-6)
    assert translation_error(-t, t) == pytest.approx(180.0)
    assert translation_error(-t, t, sign_agnostic=True) == pytest.approx(0.0, abs=1e-6)
    assert translation_error((1, 0, 0), (0, 1, 0)) == pytest.approx(90.0)
    with pytest.raises(ValueError):
        translation_error((0, 0, 0), t)


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_metrics_scale_invariant_in_t(a, b):
    t, t_gt = np.array([0.3, -0.2, 0.9]), np.array([0.1, 0.1, 1.0])
    assert translation_error(a * t, b * t_gt) == pytest.approx(translation_error(t, t_gt), abs=1e-9)
    xi = stability_metrics(np.eye(3), a * t, 500, np.eye(3), b * t_gt, 500)
    assert xi[2] == pytest.approx(stability_metrics(np.eye(3), t, 500, np.eye(3), t_gt, 500)[2], abs=1e-12)


def test_focal_error_examples():
    assert focal_error(500, 500) == 0
    assert focal_error(550, 500) == pytest.approx(0.10)
    assert focal_error(450, 500) == pytest.approx(0.10)


def test_stability_metrics():
    R = rot([0.1, 0.2, 0.3, 0.9])
    t = np.array([0.0, 0.6, 0.8])
    assert stability_metrics(R, t, 400.0, R, t, 400.0) == (0.0, 0.0, 0.0)
    # sign alignment
    assert stability_metrics(R, -t, 400.0, R, t, 400.0)[2] == 0.0
    D = np.zeros((3, 3))
    D[0, 1] = 1e-3
    assert stability_metrics(R + D, t, 400.0, R, t, 400.0)[1] == pytest.approx(1e-3)


def test_error_report():
    sc = clean_scene(seed=0)
    c = solve_2ac(*sc.correspondences, sc.imu_i, sc.imu_j, sc.principal_point)[0]
    rep = error_report(c, sc.gt_pose.R, sc.gt_pose.t, sc.gt_focal_px)
    for v in (rep.rot_err_deg, rep.trans_err_deg, rep.focal_rel_err, rep.xi_f, rep.xi_R, rep.xi_t):
        assert 0 <= v < 1e-6
