"""Companion linearization of B'(s) J(f) = 0 and its solution.

C (6x42, columns s^a f^b at 6a+b) splits into B'_0..B'_6, one 6x6 block per
power of s, acting on J = (1, f, ..., f^5). The pencil

    D L = s N L,   L = (J, sJ, ..., s^5 J)

has the s-roots as eigenvalues; f is read from the eigenvector.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .constraints import ConstraintMatrix
from .types import DegenerateNullspace, EigenFailure

log = logging.getLogger(__name__)

DEG_S = 6
BLOCK = 6
SIZE = DEG_S * BLOCK  # 36


@dataclass(frozen=True, eq=False)
class MatrixPolynomial:
    b: np.ndarray  # (7, 6, 6): b[k] multiplies s^k

    def __call__(self, s: float) -> np.ndarray:
        return sum(s**k * self.b[k] for k in range(self.b.shape[0]))


@dataclass(frozen=True, eq=False)
class Pencil:
    D: np.ndarray
    N: np.ndarray


def J(f: float) -> np.ndarray:
    return f ** np.arange(BLOCK)


def to_matrix_polynomial(C: np.ndarray) -> MatrixPolynomial:
    C = np.asarray(C, dtype=float)
    if C.shape != (BLOCK, (DEG_S + 1) * BLOCK):
        raise ValueError(f"expected a 6x42 coefficient matrix, got {C.shape}")
    return MatrixPolynomial(C.reshape(BLOCK, DEG_S + 1, BLOCK).transpose(1, 0, 2).copy())


def linearize(mp: MatrixPolynomial) -> Pencil:
    n = BLOCK
    D = np.zeros((SIZE, SIZE))
    N = np.eye(SIZE)
    D[: SIZE - n, n:] = np.eye(SIZE - n)
    D[SIZE - n :, :] = -np.hstack([mp.b[k] for k in range(DEG_S)])
    N[SIZE - n :, SIZE - n :] = mp.b[DEG_S]
    return Pencil(D, N)


def _equilibrate(D: np.ndarray, N: np.ndarray, sweeps: int = 8):
    """Power-of-two row/column scalings r, c so that r*(|D|+|N|)*c is roughly balanced."""
    W = np.abs(D) + np.abs(N)
    r = np.ones(W.shape[0])
    c = np.ones(W.shape[1])
    for _ in range(sweeps):
        rows = np.max(W * r[:, None] * c[None, :], axis=1)
        rows[rows == 0] = 1.0
        r = r * 2.0 ** -np.round(np.log2(rows))
        cols = np.max(W * r[:, None] * c[None, :], axis=0)
        cols[cols == 0] = 1.0
        c = c * 2.0 ** -np.round(np.log2(cols))
    return r, c


def solve_pencil(p: Pencil, balance: bool = True, imag_tol: float = 1e-8):
    """Real, finite eigenpairs of (D, N) as a list of (s, L, residual)."""
    D, N = p.D, p.N
    if balance:
        r, c = _equilibrate(D, N)
        Db, Nb = D * r[:, None] * c[None, :], N * r[:, None] * c[None, :]
    else:
        c = np.ones(SIZE)
        Db, Nb = D, N
    try:
        (alpha, beta), V = sla.eig(Db, Nb, homogeneous_eigvals=True)
    except (sla.LinAlgError, ValueError) as exc:
        cond = float(np.linalg.cond(N)) if np.all(np.isfinite(N)) else float("inf")
        raise EigenFailure(f"generalized eigensolver failed: {exc}", cond) from exc
    V = V * c[:, None]
    out = []
    scale = np.maximum(np.abs(alpha), np.abs(beta))
    for k in range(SIZE):
        if abs(beta[k]) <= 1e-13 * scale[k] or scale[k] == 0:
            continue  # infinite eigenvalue
        lam = alpha[k] / beta[k]
        if not np.isfinite(lam) or abs(lam.imag) > imag_tol * (1.0 + abs(lam.real)):
            continue
        s = float(lam.real)
        L = V[:, k]
        # eigenvectors of a real eigenvalue are real up to a complex phase
        L = np.real(L * np.exp(-1j * np.angle(L[np.argmax(np.abs(L))])))
        nrm = np.linalg.norm(L)
        if nrm == 0:
            continue
        res = float(np.linalg.norm(D @ L - s * (N @ L)) / nrm)
        out.append((s, L / nrm, res))
    return out


def filter_solutions(pairs, tol_consistency: float = 1e-4, min_f: float = 1e-8):
    """Keep eigenvectors shaped like (J, sJ, ...) with f = L[1]/L[0] > min_f.

    ``min_f`` removes the f = 0 roots introduced by multiplying g1, g2 by f,
    which roundoff can leave at f ~ +1e-16.

    ``pairs`` holds (s, L) or (s, L, residual) tuples; returns (s, f) tuples.
    """
    kept = []
    for item in pairs:
        s, L = item[0], np.asarray(item[1], dtype=float)
        nrm = np.linalg.norm(L)
        if abs(L[0]) <= 1e-10 * nrm:
            continue
        L = L / L[0]
        f = L[1]
        if not f > min_f:
            continue
        if abs(L[2] - f * f) > tol_consistency * (1.0 + f * f):
            continue
        head = L[:BLOCK]
        if np.max(np.abs(L[BLOCK : 2 * BLOCK] - s * head)) > tol_consistency * (1.0 + abs(s)) * np.max(np.abs(head)):
            continue
        kept.append((float(s), float(f)))
    return kept


def recover_translation(M: ConstraintMatrix, s: float, f: float, degenerate_tol: float = 1e-8):
    """Unit right null vector of M(s, f) and the ratio sigma_min / sigma_second.

    Rows are scaled by their term magnitude at (s, f) so a row that vanishes by
    cancellation stays small. Raises DegenerateNullspace if the second-smallest
    singular value is also negligible.
    """
    Mv = M.evaluate(s, f)
    mag = M.magnitude(s, f)
    mag[mag == 0] = 1.0
    Mv = Mv / mag[:, None]
    _, sv, Vt = np.linalg.svd(Mv)
    # reference: a unit row set has sigma ~ 1
    if sv[1] <= degenerate_tol:
        raise DegenerateNullspace(f"null space of M is not one-dimensional (sigma = {sv})")
    t = Vt[-1]
    return t / np.linalg.norm(t), float(sv[2] / sv[1])
