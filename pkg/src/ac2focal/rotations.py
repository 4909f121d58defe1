"""Rotation helpers: skew matrices, IMU alignment, Cayley rotation about Y, pose assembly.

Cayley excludes theta = +-pi (s -> inf); that regime is unsupported.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import ImuAttitude, Pose


def cross_matrix(v) -> np.ndarray:
    x, y, z = np.asarray(v, dtype=float).reshape(3)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rot_x(a: float) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s, c]])


def rot_z(a: float) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_y(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def imu_alignment(att: ImuAttitude) -> np.ndarray:
    """R_x(pitch) @ R_z(roll); maps camera coordinates into the gravity-aligned frame."""
    return rot_x(att.pitch) @ rot_z(att.roll)


def attitude_from_gravity(g_cam) -> ImuAttitude:
    """Inverse of imu_alignment on the vertical axis: the attitude whose
    alignment sends the camera-frame unit vector ``g_cam`` to +Y."""
    g = np.asarray(g_cam, dtype=float)
    g = g / np.linalg.norm(g)
    pitch = float(np.arcsin(np.clip(g[2], -1.0, 1.0)))
    roll = float(np.arctan2(-g[0], g[1]))
    return ImuAttitude(roll=roll, pitch=pitch)


@dataclass(frozen=True)
class CayleyRy:
    numerator: np.ndarray
    denominator: float

    @property
    def matrix(self) -> np.ndarray:
        return self.numerator / self.denominator


def cayley_numerator(s: float) -> np.ndarray:
    ss = s * s
    return np.array([[1.0 - ss, 0.0, 2.0 * s], [0.0, 1.0 + ss, 0.0], [-2.0 * s, 0.0, 1.0 - ss]])


def cayley_ry(s: float) -> CayleyRy:
    return CayleyRy(cayley_numerator(s), 1.0 + s * s)


def s_from_rotation(Ry: np.ndarray) -> float:
    """Cayley parameter tan(theta/2) of a rotation about Y."""
    theta = np.arctan2(Ry[0, 2], Ry[0, 0])
    return float(np.tan(theta / 2.0))


def compose_relative_pose(s: float, t_aligned, imu_i: ImuAttitude, imu_j: ImuAttitude) -> Pose:
    Ri = imu_alignment(imu_i)
    Rj = imu_alignment(imu_j)
    R = Rj.T @ cayley_ry(s).matrix @ Ri
    t = Rj.T @ np.asarray(t_aligned, dtype=float)
    return Pose(R, t / np.linalg.norm(t))


def decompose_relative_pose(pose: Pose, imu_i: ImuAttitude, imu_j: ImuAttitude):
    """(s, t_aligned) such that compose_relative_pose reproduces ``pose``."""
    Ri = imu_alignment(imu_i)
    Rj = imu_alignment(imu_j)
    Ry = Rj @ pose.R @ Ri.T
    return s_from_rotation(Ry), Rj @ pose.t


def essential_from(s: float, t_aligned) -> np.ndarray:
    """[t~]x times the Cayley numerator; the 1/(1+s^2) factor is dropped."""
    return cross_matrix(t_aligned) @ cayley_numerator(s)
