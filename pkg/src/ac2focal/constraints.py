"""The 4x3 polynomial constraint matrix M(s, f), its 3x3 minors and the 6x42
coefficient matrix.

Unknowns: s = tan(theta/2) of the rotation about the vertical axis, and
f = scale / focal_px.  Pixel coordinates are recentered on the principal
point and divided by ``scale`` so that f is O(1) for a sensible scale; with
``scale=1`` f is the reciprocal focal length in pixels.

Rays are K^-1 x = (f*u, f*v, 1) in the recentered, scaled coordinates; after
IMU alignment q = R_imu @ K^-1 x. Row layout of M (t~ as the unknown vector):

    row 0, 1 : affine rows of ac_a
    row 2    : point (epipolar) row of ac_a
    row 3    : point row of ac_b

Every entry carries one Cayley numerator, so the common 1/(1+s^2) is dropped.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .polynomials import CAPACITY, BivariatePoly, poly_det3
from .rotations import imu_alignment
from .types import AffineCorrespondence, DegenerateInput, ImuAttitude

# Cayley numerator as a matrix polynomial in s: Y0 + s*Y1 + s^2*Y2
_CAYLEY = np.zeros((3, 1, 3, 3))
_CAYLEY[0, 0] = np.eye(3)
_CAYLEY[1, 0] = [[0, 0, 2], [0, 0, 0], [-2, 0, 0]]
_CAYLEY[2, 0] = np.diag([-1.0, 1.0, -1.0])

MINOR_ROWS = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))


# Polynomial-valued arrays: shape (deg_s+1, deg_f+1, *entry_shape).

def _pmatmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1,
                    a.shape[2], b.shape[3]))
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            if np.any(a[i, j]):
                out[i : i + b.shape[0], j : j + b.shape[1]] += np.einsum("mn,abnk->abmk", a[i, j], b)
    return out


def _const(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    return m.reshape((1, 1) + m.shape)


def _pskew(v: np.ndarray) -> np.ndarray:
    """Skew matrix of a polynomial 3-vector stored as (ds, df, 3, 1)."""
    x, y, z = v[..., 0, 0], v[..., 1, 0], v[..., 2, 0]
    out = np.zeros(v.shape[:2] + (3, 3))
    out[..., 0, 1], out[..., 0, 2] = -z, y
    out[..., 1, 0], out[..., 1, 2] = z, -x
    out[..., 2, 0], out[..., 2, 1] = -y, x
    return out


def _ray(R_imu: np.ndarray, uv: np.ndarray) -> np.ndarray:
    """Aligned ray R_imu @ (f*u, f*v, 1) as a (1, 2, 3, 1) polynomial vector."""
    q = np.zeros((1, 2, 3, 1))
    q[0, 0, :, 0] = R_imu[:, 2]
    q[0, 1, :, 0] = R_imu[:, :2] @ uv
    return q


def ac_rows(uv_i, uv_j, A, R_i: np.ndarray, R_j: np.ndarray) -> np.ndarray:
    """Affine rows (2) and point row (1) of one correspondence, shape (3, 2, 3, 3)
    as (ds, df, row, col) with all rows padded to degree (2, 2)."""
    q_i = _ray(R_i, np.asarray(uv_i, dtype=float))
    q_j = _ray(R_j, np.asarray(uv_j, dtype=float))
    Y = _CAYLEY
    Yq_i = _pmatmul(Y, q_i)
    # epipolar row: q_j . (t x Y q_i) = t . (Y q_i x q_j)
    point = _pmatmul(_pskew(Yq_i), q_j)[..., 0]
    # d/dx of the epipolar form: A^-T (R_i^T Y^T [q_j]x)_{1:2} - (R_j^T [Y q_i]x)_{1:2}
    Yt = np.swapaxes(Y, 2, 3)
    left = _pmatmul(_const(R_i.T), _pmatmul(Yt, _pskew(q_j)))[:, :, :2, :]
    right = _pmatmul(_const(R_j.T), _pskew(Yq_i))[:, :, :2, :]
    Ainv_t = np.linalg.inv(np.asarray(A, dtype=float)).T
    affine = _pmatmul(_const(Ainv_t), left) - right
    out = np.zeros((3, 3, 3, 3))
    out[: affine.shape[0], : affine.shape[1], :2, :] = affine
    out[: point.shape[0], : point.shape[1], 2, :] = point
    return out[:, :, :, :]


@dataclass(frozen=True, eq=False)
class ConstraintMatrix:
    coeffs: np.ndarray  # (3, 3, 4, 3): coeffs[i, j, r, c] multiplies s^i f^j in M[r, c]
    scale: float = 1.0
    principal_point: np.ndarray = field(default_factory=lambda: np.zeros(2))
    recentered: tuple = ()

    @property
    def entries(self) -> list[list[BivariatePoly]]:
        return [[BivariatePoly(self.coeffs[:, :, r, c]) for c in range(3)] for r in range(4)]

    def evaluate(self, s: float, f: float) -> np.ndarray:
        sp = s ** np.arange(self.coeffs.shape[0])
        fp = f ** np.arange(self.coeffs.shape[1])
        return np.einsum("i,j,ijrc->rc", sp, fp, self.coeffs)

    def magnitude(self, s: float, f: float) -> np.ndarray:
        """Per-row sum of |term| at (s, f): the scale against which cancellation is judged."""
        sp = np.abs(s) ** np.arange(self.coeffs.shape[0])
        fp = np.abs(f) ** np.arange(self.coeffs.shape[1])
        return np.einsum("i,j,ijrc->r", sp, fp, np.abs(self.coeffs))

    def f_from_focal(self, focal_px: float) -> float:
        return self.scale / focal_px

    def focal_from_f(self, f: float) -> float:
        return self.scale / f


def recenter(ac: AffineCorrespondence, principal_point, scale: float = 1.0):
    pp = np.asarray(principal_point, dtype=float)
    return (ac.x_i - pp) / scale, (ac.x_j - pp) / scale


def build_M(
    ac_a: AffineCorrespondence,
    ac_b: AffineCorrespondence,
    imu_i: ImuAttitude,
    imu_j: ImuAttitude,
    principal_point=(0.0, 0.0),
    scale: float = 1.0,
    normalize: bool = True,
) -> ConstraintMatrix:
    """Rows 0-2 from ``ac_a`` (two affine, one point), row 3 the point row of ``ac_b``.

    With ``normalize`` each row is divided by its largest coefficient magnitude.
    """
    for ac in (ac_a, ac_b):
        if not ac.is_valid():
            raise DegenerateInput("affine correspondence is non-finite or has singular A")
    R_i = imu_alignment(imu_i)
    R_j = imu_alignment(imu_j)
    ua_i, ua_j = recenter(ac_a, principal_point, scale)
    ub_i, ub_j = recenter(ac_b, principal_point, scale)
    rows_a = ac_rows(ua_i, ua_j, ac_a.A, R_i, R_j)
    rows_b = ac_rows(ub_i, ub_j, ac_b.A, R_i, R_j)
    coeffs = np.concatenate([rows_a, rows_b[:, :, 2:3, :]], axis=2)
    if normalize:
        peak = np.max(np.abs(coeffs), axis=(0, 1, 3))
        peak[peak == 0] = 1.0
        coeffs = coeffs / peak[None, None, :, None]
    return ConstraintMatrix(
        coeffs=coeffs,
        scale=float(scale),
        principal_point=np.asarray(principal_point, dtype=float),
        recentered=((ua_i, ua_j), (ub_i, ub_j)),
    )


_PERMS = ((0, 1, 2, 1.0), (0, 2, 1, -1.0), (1, 0, 2, -1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0), (2, 1, 0, -1.0))


def _bconv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched grid convolution over the two leading axes."""
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1) + a.shape[2:])
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            out[i : i + b.shape[0], j : j + b.shape[1]] += a[i, j] * b
    return out


def determinant_grids(M: ConstraintMatrix) -> np.ndarray:
    """Coefficient grids of g1..g4 as a (4, 7, 7) array (Leibniz expansion, batched)."""
    c = M.coeffs
    rows = np.array(MINOR_ROWS)  # (4, 3)
    cols = np.array([p[:3] for p in _PERMS])  # (6, 3)
    signs = np.array([p[3] for p in _PERMS])
    # factor k of each term: entry (rows[:, k], cols[:, k]) -> (ds, df, 4, 6)
    fac = [c[:, :, rows[:, k][:, None], cols[:, k][None, :]] for k in range(3)]
    prod = _bconv(_bconv(fac[0], fac[1]), fac[2])  # (7, 7, 4, 6)
    return np.einsum("ijmp,p->mij", prod, signs)


def determinant_system(M: ConstraintMatrix, capacity=CAPACITY):
    """g1..g4: determinants of rows (123), (124), (134), (234) of M.

    With ``capacity=None`` the cofactor expansion runs on BivariatePoly
    objects without a degree bound (slow; used for degree checks).
    """
    if capacity is None:
        E = M.entries
        return tuple(poly_det3([E[r] for r in rows], capacity=None) for rows in MINOR_ROWS)
    grids = determinant_grids(M)
    out = []
    for g in grids:
        p = BivariatePoly(g)
        p.grid(capacity)  # raises on overflow
        out.append(p)
    return tuple(out)


def normalize_poly(g: BivariatePoly) -> BivariatePoly:
    peak = g.max_abs()
    return g if peak == 0 else g.scaled(1.0 / peak)


def coefficient_matrix(g1, g2, g3, g4, normalize: bool = True) -> np.ndarray:
    """6x42 matrix whose rows are f*g1, f*g2, g3, g4, g1, g2 flattened on X3."""
    rows = [g1.shift_f(), g2.shift_f(), g3, g4, g1, g2]
    if normalize:
        rows = [normalize_poly(r) for r in rows]
    return np.vstack([r.flatten() for r in rows])


def normalized_grids(gs) -> np.ndarray:
    """Stack g_k on the X3 grid, each scaled to unit max coefficient."""
    out = np.stack([g.grid(CAPACITY) for g in gs])
    peak = np.max(np.abs(out), axis=(1, 2))
    peak[peak == 0] = 1.0
    return out / peak[:, None, None]


def system_residual(gs, s: float, f: float) -> float:
    """max_k |g_k(s, f)| with each g_k scaled to unit max coefficient.

    ``gs`` is a sequence of BivariatePoly or the output of normalized_grids.
    """
    grids = gs if isinstance(gs, np.ndarray) else normalized_grids(gs)
    sp = s ** np.arange(CAPACITY[0])
    fp = f ** np.arange(CAPACITY[1])
    return float(np.max(np.abs(np.einsum("i,kij,j->k", sp, grids, fp))))


def polish_root(grids: np.ndarray, s: float, f: float, iterations: int = 2):
    """Gauss-Newton on g_k(s, f) = 0 (normalized grids); a step is kept only
    if it lowers the residual."""
    ks = np.arange(CAPACITY[0])
    kf = np.arange(CAPACITY[1])

    def parts(s, f):
        sp, fp = s**ks, f**kf
        dsp = np.concatenate([[0.0], ks[1:] * s ** (ks[1:] - 1)])
        dfp = np.concatenate([[0.0], kf[1:] * f ** (kf[1:] - 1)])
        r = np.einsum("i,kij,j->k", sp, grids, fp)
        jac = np.column_stack([np.einsum("i,kij,j->k", dsp, grids, fp), np.einsum("i,kij,j->k", sp, grids, dfp)])
        return r, jac

    r, jac = parts(s, f)
    best = np.max(np.abs(r))
    for _ in range(iterations):
        step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        s_new, f_new = s + step[0], f + step[1]
        r_new, jac_new = parts(s_new, f_new)
        if not np.max(np.abs(r_new)) < best:
            break
        s, f, r, jac, best = s_new, f_new, r_new, jac_new, np.max(np.abs(r_new))
    return float(s), float(f)


def rescue_root(grids: np.ndarray, s: float, f_range=(1e-8, np.inf), tol: float = 1e-9, iterations: int = 40):
    """Recover f for an eigenvalue s whose eigenvector lost its monomial shape
    (a multiple root: pure rotation, repeated points).

    Candidate f values are the real roots of one g_k(s, .) inside ``f_range``; the best
    is polished and kept only if the normalized residual drops below ``tol``.
    Returns (s, f) or None.
    """
    sp = s ** np.arange(CAPACITY[0])
    # every g_k vanishes at a common root, so one of them suffices for candidates
    coef = sp @ grids  # (4, 6): coefficients in f, low to high
    cf = coef[np.argmax(np.abs(coef).max(axis=1))]
    nz = np.flatnonzero(np.abs(cf) > 1e-12 * max(np.abs(cf).max(), 1e-300))
    if len(nz) < 2:
        return None
    r = np.roots(cf[: nz[-1] + 1][::-1])
    lo, hi = f_range
    cands = [float(x.real) for x in r if abs(x.imag) <= 1e-6 * (1 + abs(x)) and lo <= x.real <= hi]
    if not cands:
        return None
    f = min(cands, key=lambda x: system_residual(grids, s, x))
    if system_residual(grids, s, f) > 1e-5:
        return None
    s, f = polish_root(grids, s, f, iterations=iterations)
    if not (f > 0 and system_residual(grids, s, f) <= tol):
        return None
    return s, f
