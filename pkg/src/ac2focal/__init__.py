"""Relative pose and unknown focal length from two affine correspondences
with a known vertical direction."""

from .types import (
    AffineCorrespondence,
    CameraIntrinsics,
    DegenerateInput,
    DegenerateNullspace,
    EigenFailure,
    ImuAttitude,
    Pose,
    SolutionCandidate,
)
from .solver import SolveOptions, solve_2ac

__all__ = [
    "AffineCorrespondence",
    "CameraIntrinsics",
    "DegenerateInput",
    "DegenerateNullspace",
    "EigenFailure",
    "ImuAttitude",
    "Pose",
    "SolutionCandidate",
    "SolveOptions",
    "solve_2ac",
]
