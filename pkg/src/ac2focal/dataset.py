"""Line-oriented dataset files (schema v1).

    ac2focal-dataset v1
    image_size <w> <h>
    principal_point <cx> <cy>
    imu_i <roll> <pitch>                 # radians, as reported to the solver
    imu_j <roll> <pitch>
    imu_i_true <roll> <pitch>            # optional
    imu_j_true <roll> <pitch>            # optional
    focal_px <f>                         # optional ground truth
    gt_R <r00> ... <r22>                 # optional, row-major
    gt_t <tx> <ty> <tz>                  # optional
    ac <u_i> <v_i> <u_j> <v_j> <a11> <a12> <a21> <a22> [<inlier 0|1>]

Blank lines and lines starting with '#' are ignored. Floats are written with
repr() so a write/read round trip is exact.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .types import AffineCorrespondence, ImuAttitude

MAGIC = "ac2focal-dataset"
VERSION = "v1"

_HEADER_ARITY = {
    "image_size": 2,
    "principal_point": 2,
    "imu_i": 2,
    "imu_j": 2,
    "imu_i_true": 2,
    "imu_j_true": 2,
    "focal_px": 1,
    "gt_R": 9,
    "gt_t": 3,
}
_REQUIRED = ("image_size", "principal_point", "imu_i", "imu_j")


class DatasetParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(eq=False)
class DatasetFile:
    image_size: tuple
    principal_point: np.ndarray
    imu_i: ImuAttitude
    imu_j: ImuAttitude
    correspondences: list = field(default_factory=list)
    inliers: list | None = None
    imu_i_true: ImuAttitude | None = None
    imu_j_true: ImuAttitude | None = None
    focal_px: float | None = None
    gt_R: np.ndarray | None = None
    gt_t: np.ndarray | None = None

    def __eq__(self, other):
        if not isinstance(other, DatasetFile):
            return NotImplemented
        def same(a, b):
            if a is None or b is None:
                return a is None and b is None
            return np.array_equal(np.asarray(a), np.asarray(b))
        return (
            tuple(self.image_size) == tuple(other.image_size)
            and same(self.principal_point, other.principal_point)
            and self.imu_i == other.imu_i
            and self.imu_j == other.imu_j
            and self.imu_i_true == other.imu_i_true
            and self.imu_j_true == other.imu_j_true
            and self.focal_px == other.focal_px
            and same(self.gt_R, other.gt_R)
            and same(self.gt_t, other.gt_t)
            and list(self.correspondences) == list(other.correspondences)
            and self.inliers == other.inliers
        )

    @classmethod
    def from_scene(cls, scene) -> "DatasetFile":
        return cls(
            image_size=tuple(int(v) for v in scene.config.image_size),
            principal_point=np.asarray(scene.principal_point, dtype=float),
            imu_i=scene.imu_i,
            imu_j=scene.imu_j,
            correspondences=list(scene.correspondences),
            inliers=[bool(b) for b in scene.inliers],
            imu_i_true=scene.imu_i_true,
            imu_j_true=scene.imu_j_true,
            focal_px=float(scene.gt_focal_px),
            gt_R=np.asarray(scene.gt_pose.R),
            gt_t=np.asarray(scene.gt_pose.t),
        )


def _fmt(*vals) -> str:
    return " ".join(repr(float(v)) for v in vals)


def dumps(ds: DatasetFile) -> str:
    out = [f"{MAGIC} {VERSION}", f"image_size {int(ds.image_size[0])} {int(ds.image_size[1])}"]
    out.append("principal_point " + _fmt(*ds.principal_point))
    out.append("imu_i " + _fmt(ds.imu_i.roll, ds.imu_i.pitch))
    out.append("imu_j " + _fmt(ds.imu_j.roll, ds.imu_j.pitch))
    if ds.imu_i_true is not None:
        out.append("imu_i_true " + _fmt(ds.imu_i_true.roll, ds.imu_i_true.pitch))
    if ds.imu_j_true is not None:
        out.append("imu_j_true " + _fmt(ds.imu_j_true.roll, ds.imu_j_true.pitch))
    if ds.focal_px is not None:
        out.append("focal_px " + _fmt(ds.focal_px))
    if ds.gt_R is not None:
        out.append("gt_R " + _fmt(*np.asarray(ds.gt_R).ravel()))
    if ds.gt_t is not None:
        out.append("gt_t " + _fmt(*ds.gt_t))
    for k, ac in enumerate(ds.correspondences):
        line = "ac " + _fmt(*ac.x_i, *ac.x_j, *ac.A.ravel())
        if ds.inliers is not None:
            line += f" {int(bool(ds.inliers[k]))}"
        out.append(line)
    return "\n".join(out) + "\n"


def loads(text: str) -> DatasetFile:
    header: dict = {}
    acs, flags = [], []
    seen_magic = False
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, *rest = line.split()
        if not seen_magic:
            if key != MAGIC:
                raise DatasetParseError(lineno, f"expected '{MAGIC} {VERSION}' header, got {key!r}")
            if rest != [VERSION]:
                raise DatasetParseError(lineno, f"unsupported schema version {' '.join(rest)!r}")
            seen_magic = True
            continue
        try:
            vals = [float(v) for v in rest]
        except ValueError as exc:
            raise DatasetParseError(lineno, f"non-numeric value: {exc}") from None
        if key == "ac":
            if len(vals) not in (8, 9):
                raise DatasetParseError(lineno, f"'ac' takes 8 or 9 values, got {len(vals)}")
            if len(vals) == 9 and vals[8] not in (0.0, 1.0):
                raise DatasetParseError(lineno, "inlier flag must be 0 or 1")
            if flags and (len(vals) == 9) != (flags[-1] is not None):
                raise DatasetParseError(lineno, "inlier flag must be given for all or no correspondences")
            acs.append(AffineCorrespondence(vals[0:2], vals[2:4], np.reshape(vals[4:8], (2, 2))))
            flags.append(bool(vals[8]) if len(vals) == 9 else None)
        elif key in _HEADER_ARITY:
            if key in header:
                raise DatasetParseError(lineno, f"duplicate field {key!r}")
            if acs:
                raise DatasetParseError(lineno, f"header field {key!r} after correspondence records")
            if len(vals) != _HEADER_ARITY[key]:
                raise DatasetParseError(lineno, f"{key!r} takes {_HEADER_ARITY[key]} values, got {len(vals)}")
            header[key] = vals
        else:
            raise DatasetParseError(lineno, f"unknown field {key!r}")
    if not seen_magic:
        raise DatasetParseError(1, "empty dataset")
    for key in _REQUIRED:
        if key not in header:
            raise DatasetParseError(lineno, f"missing required field {key!r}")

    def att(k):
        return ImuAttitude(*header[k]) if k in header else None

    return DatasetFile(
        image_size=(int(header["image_size"][0]), int(header["image_size"][1])),
        principal_point=np.array(header["principal_point"]),
        imu_i=att("imu_i"),
        imu_j=att("imu_j"),
        correspondences=acs,
        inliers=None if not flags or flags[0] is None else flags,
        imu_i_true=att("imu_i_true"),
        imu_j_true=att("imu_j_true"),
        focal_px=header["focal_px"][0] if "focal_px" in header else None,
        gt_R=np.reshape(header["gt_R"], (3, 3)) if "gt_R" in header else None,
        gt_t=np.array(header["gt_t"]) if "gt_t" in header else None,
    )


def read(path) -> DatasetFile:
    return loads(Path(path).read_text())


def write(ds: DatasetFile, path) -> None:
    Path(path).write_text(dumps(ds))
