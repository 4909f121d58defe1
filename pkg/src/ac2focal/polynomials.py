"""Dense bivariate polynomials in (s, f).

``coeffs[i, j]`` multiplies ``s**i * f**j``. The working grid is 7x6
(s^0..s^6, f^0..f^5); flattening is f-fastest, so the flat index of
``s**i f**j`` is ``6*i + j``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

CAPACITY = (7, 6)


class PolyCapacityError(OverflowError):
    pass


def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.nonzero(c)
    if len(nz[0]) == 0:
        return np.zeros((1, 1))
    return c[: nz[0].max() + 1, : nz[1].max() + 1]


@dataclass(frozen=True, eq=False)
class BivariatePoly:
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if c.ndim != 2:
            raise ValueError("coefficient grid must be 2-D")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite coefficient")
        c = _trim(c).copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def constant(cls, value: float) -> "BivariatePoly":
        return cls(np.array([[float(value)]]))

    @classmethod
    def zero(cls) -> "BivariatePoly":
        return cls.constant(0.0)

    @classmethod
    def from_terms(cls, terms: dict) -> "BivariatePoly":
        """``{(deg_s, deg_f): coeff}`` -> polynomial."""
        if not terms:
            return cls.zero()
        ds = max(i for i, _ in terms) + 1
        df = max(j for _, j in terms) + 1
        c = np.zeros((ds, df))
        for (i, j), v in terms.items():
            c[i, j] += v
        return cls(c)

    @property
    def degree(self) -> tuple[int, int]:
        """(deg_s, deg_f) over nonzero coefficients; (0, 0) for the zero polynomial."""
        return self.coeffs.shape[0] - 1, self.coeffs.shape[1] - 1

    def terms(self) -> dict:
        return {(int(i), int(j)): float(self.coeffs[i, j]) for i, j in zip(*np.nonzero(self.coeffs))}

    def grid(self, shape=CAPACITY) -> np.ndarray:
        ds, df = self.coeffs.shape
        if ds > shape[0] or df > shape[1]:
            raise PolyCapacityError(f"degree {self.degree} does not fit grid {shape}")
        out = np.zeros(shape)
        out[:ds, :df] = self.coeffs
        return out

    def flatten(self) -> np.ndarray:
        return self.grid(CAPACITY).ravel()

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def scaled(self, k: float) -> "BivariatePoly":
        return BivariatePoly(self.coeffs * k)

    def shift_f(self, n: int = 1) -> "BivariatePoly":
        """Multiply by f**n."""
        return BivariatePoly(np.pad(self.coeffs, ((0, 0), (n, 0))))

    def __add__(self, other):
        return poly_add(self, _lift(other))

    __radd__ = __add__

    def __neg__(self):
        return BivariatePoly(-self.coeffs)

    def __sub__(self, other):
        return poly_add(self, -_lift(other))

    def __rsub__(self, other):
        return poly_add(_lift(other), -self)

    def __mul__(self, other):
        if np.isscalar(other):
            return self.scaled(float(other))
        return poly_mul(self, other, capacity=None)

    __rmul__ = __mul__

    def __call__(self, s, f):
        return poly_eval(self, s, f)

    def __eq__(self, other):
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    def __repr__(self):
        return f"BivariatePoly({self.terms()})"


def _lift(x) -> BivariatePoly:
    return x if isinstance(x, BivariatePoly) else BivariatePoly.constant(x)


def poly_add(a: BivariatePoly, b: BivariatePoly) -> BivariatePoly:
    shape = (max(a.coeffs.shape[0], b.coeffs.shape[0]), max(a.coeffs.shape[1], b.coeffs.shape[1]))
    return BivariatePoly(a.grid(shape) + b.grid(shape))


def poly_mul(a: BivariatePoly, b: BivariatePoly, capacity=CAPACITY) -> BivariatePoly:
    """Grid convolution. ``capacity=None`` lifts the degree bound."""
    (m0, m1), (n0, n1) = a.coeffs.shape, b.coeffs.shape
    out = np.zeros((m0 + n0 - 1, m1 + n1 - 1))
    for i, j in zip(*np.nonzero(a.coeffs)):
        out[i : i + n0, j : j + n1] += a.coeffs[i, j] * b.coeffs
    p = BivariatePoly(out)
    if capacity is not None:
        ds, df = p.coeffs.shape
        if ds > capacity[0] or df > capacity[1]:
            raise PolyCapacityError(f"product degree {p.degree} exceeds capacity {capacity}")
    return p


def poly_eval(p: BivariatePoly, s, f):
    return npoly.polyval2d(s, f, p.coeffs)


def poly_det3(m, capacity=CAPACITY) -> BivariatePoly:
    """Cofactor expansion of a 3x3 grid of polynomials along the first row."""
    m = [[_lift(x) for x in row] for row in m]

    def mul(a, b):
        return poly_mul(a, b, capacity=capacity)

    def minor(r1, r2, c1, c2):
        return mul(m[r1][c1], m[r2][c2]) - mul(m[r1][c2], m[r2][c1])

    return (
        mul(m[0][0], minor(1, 2, 1, 2))
        - mul(m[0][1], minor(1, 2, 0, 2))
        + mul(m[0][2], minor(1, 2, 0, 1))
    )


def monomials(s: float, f: float, shape=CAPACITY) -> np.ndarray:
    """Flattened monomial vector on ``shape`` (f-fastest); X3 for the default grid."""
    sp = s ** np.arange(shape[0])
    fp = f ** np.arange(shape[1])
    return np.outer(sp, fp).ravel()
