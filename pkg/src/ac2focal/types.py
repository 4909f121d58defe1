"""Shared value records and error classes."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DegenerateInput(ValueError):
    """Duplicate, collinear or otherwise unusable correspondences."""


class DegenerateNullspace(ArithmeticError):
    """Constraint matrix has a null space of dimension > 1 at the solution."""


class EigenFailure(ArithmeticError):
    def __init__(self, message: str, condition: float = float("nan")):
        super().__init__(f"{message} (pencil condition estimate {condition:.3e})")
        self.condition = condition


def _frozen(a, shape) -> np.ndarray:
    arr = np.array(a, dtype=float).reshape(shape)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CameraIntrinsics:
    focal_px: float
    principal_point: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        if not self.focal_px > 0:
            raise ValueError(f"focal_px must be positive, got {self.focal_px}")
        object.__setattr__(self, "principal_point", _frozen(self.principal_point, (2,)))

    @property
    def K(self) -> np.ndarray:
        cx, cy = self.principal_point
        return np.array([[self.focal_px, 0.0, cx], [0.0, self.focal_px, cy], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class AffineCorrespondence:
    """Point pair plus the 2x2 Jacobian of the view-i -> view-j transfer."""

    x_i: np.ndarray
    x_j: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x_i", _frozen(self.x_i, (2,)))
        object.__setattr__(self, "x_j", _frozen(self.x_j, (2,)))
        object.__setattr__(self, "A", _frozen(self.A, (2, 2)))

    def is_valid(self) -> bool:
        return bool(
            np.all(np.isfinite(self.x_i))
            and np.all(np.isfinite(self.x_j))
            and np.all(np.isfinite(self.A))
            and abs(np.linalg.det(self.A)) > 1e-12
        )

    def __eq__(self, other):
        if not isinstance(other, AffineCorrespondence):
            return NotImplemented
        return (
            np.array_equal(self.x_i, other.x_i)
            and np.array_equal(self.x_j, other.x_j)
            and np.array_equal(self.A, other.A)
        )

    __hash__ = None


@dataclass(frozen=True)
class ImuAttitude:
    """Roll (about z) and pitch (about x), radians.

    The benchmark regime keeps both well inside (-pi/2, pi/2); this is not enforced.
    """

    roll: float = 0.0
    pitch: float = 0.0

    @classmethod
    def from_degrees(cls, roll_deg: float, pitch_deg: float) -> "ImuAttitude":
        return cls(float(np.deg2rad(roll_deg)), float(np.deg2rad(pitch_deg)))


@dataclass(frozen=True)
class Pose:
    """X_j = R @ X_i + t, with t a unit direction."""

    R: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "R", _frozen(self.R, (3, 3)))
        object.__setattr__(self, "t", _frozen(self.t, (3,)))

    def check(self, tol: float = 1e-9) -> None:
        R, t = self.R, self.t
        assert np.allclose(R.T @ R, np.eye(3), atol=tol), "R not orthonormal"
        assert abs(np.linalg.det(R) - 1.0) < tol, "det R != 1"
        assert abs(np.linalg.norm(t) - 1.0) < 1e-12, "t not unit norm"

    def __eq__(self, other):
        if not isinstance(other, Pose):
            return NotImplemented
        return np.array_equal(self.R, other.R) and np.array_equal(self.t, other.t)

    __hash__ = None


@dataclass(frozen=True)
class SolutionCandidate:
    s: float
    f_reciprocal: float
    pose: Pose
    t_aligned: np.ndarray
    residual: float
    cheirality_ok: bool
    eig_residual: float = 0.0
    nullspace_gap: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "t_aligned", _frozen(self.t_aligned, (3,)))

    @property
    def focal_px(self) -> float:
        return 1.0 / self.f_reciprocal

    @property
    def theta(self) -> float:
        """Rotation angle about the vertical axis (radians)."""
        return 2.0 * float(np.arctan(self.s))

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "theta_deg": float(np.degrees(self.theta)),
            "focal_px": self.focal_px,
            "f_reciprocal": self.f_reciprocal,
            "R": self.pose.R.ravel().tolist(),
            "t": self.pose.t.tolist(),
            "t_aligned": self.t_aligned.tolist(),
            "residual": self.residual,
            "eig_residual": self.eig_residual,
            "nullspace_gap": self.nullspace_gap,
            "cheirality_ok": self.cheirality_ok,
        }
