"""Small exact-friendly 2x2 linear algebra for plane actions.

Vectors and matrices carry whatever scalar type they are built from
(float or Fraction), so identities like det(section(v)) = 1 can be
checked in rational arithmetic.  Norm computations return floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class MatrixNorm(str, Enum):
    """Matrix norm used for both ball membership and the star product."""

    MAX_ENTRY = "max"
    FROBENIUS = "frobenius"
    OPERATOR_2 = "operator2"


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __iter__(self):
        return iter((self.x, self.y))

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def scale(self, c) -> Vec2:
        return Vec2(c * self.x, c * self.y)

    def sup_norm(self) -> float:
        return max(abs(self.x), abs(self.y))

    def l2_norm(self) -> float:
        return math.hypot(self.x, self.y)


def as_vec(v) -> Vec2:
    if isinstance(v, Vec2):
        return v
    x, y = v
    return Vec2(x, y)


def sup_norm(v) -> float:
    return as_vec(v).sup_norm()


@dataclass(frozen=True)
class Mat2:
    """Row-major 2x2 matrix [[a, b], [c, d]]."""

    a: float
    b: float
    c: float
    d: float

    @staticmethod
    def identity() -> Mat2:
        return Mat2(1, 0, 0, 1)

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def __matmul__(self, other: Mat2) -> Mat2:
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def apply(self, v) -> Vec2:
        v = as_vec(v)
        return Vec2(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)

    def inverse(self) -> Mat2:
        det = self.det()
        if det == 0:
            raise ZeroDivisionError("singular matrix")
        if det == 1:  # unimodular fast path keeps integers exact
            return Mat2(self.d, -self.b, -self.c, self.a)
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def __neg__(self) -> Mat2:
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)


def mat_norm(m: Mat2, kind: MatrixNorm = MatrixNorm.MAX_ENTRY) -> float:
    """Matrix norm of the given kind, as a float."""
    a, b, c, d = (float(e) for e in m.entries())
    if kind == MatrixNorm.MAX_ENTRY:
        return max(abs(a), abs(b), abs(c), abs(d))
    q = a * a + b * b + c * c + d * d
    if kind == MatrixNorm.FROBENIUS:
        return math.sqrt(q)
    if kind == MatrixNorm.OPERATOR_2:
        # Largest singular value of a 2x2: s_max^2 = (q + sqrt(q^2 - 4 det^2)) / 2.
        det = a * d - b * c
        disc = max(q * q - 4.0 * det * det, 0.0)
        return math.sqrt((q + math.sqrt(disc)) / 2.0)
    raise ValueError(f"unknown norm kind {kind!r}")


def star_matrix(v, u) -> Mat2:
    """Rank-one matrix whose norm defines the star product v * u."""
    v, u = as_vec(v), as_vec(u)
    return Mat2(-u.y * v.x, u.x * v.x, -u.y * v.y, u.x * v.y)


def star_product(v, u, kind: MatrixNorm = MatrixNorm.MAX_ENTRY) -> float:
    """Norm pairing of two plane vectors.

    For the max-entry norm this is exactly sup|v| * sup|u|; for the
    Frobenius and operator-2 norms (which agree on rank-one matrices)
    it is the product of Euclidean lengths.
    """
    v, u = as_vec(v), as_vec(u)
    if kind == MatrixNorm.MAX_ENTRY:
        return v.sup_norm() * u.sup_norm()
    return mat_norm(star_matrix(v, u), kind)


def section(v) -> Mat2:
    """Unimodular matrix sending (1, 0) to v, smooth off the origin.

    section(x, y) = [[x, -y/(x^2+y^2)], [y, x/(x^2+y^2)]] has unit
    determinant for every nonzero v, and section((1, 0)) is the
    identity.  Built pointwise, so Fraction inputs stay exact.
    """
    v = as_vec(v)
    w = v.x * v.x + v.y * v.y
    if w == 0:
        raise ValueError("section undefined at the origin")
    return Mat2(v.x, -v.y / w, v.y, v.x / w)


def shear(s) -> Mat2:
    """Upper-triangular unipotent [[1, s], [0, 1]]."""
    return Mat2(1, s, 0, 1)


def diagonal_flow(t: float) -> Mat2:
    """diag(e^{t/2}, e^{-t/2}); expands the x-axis for t > 0."""
    e = math.exp(t / 2.0)
    return Mat2(e, 0.0, 0.0, 1.0 / e)


def rotation(theta: float) -> Mat2:
    c, s = math.cos(theta), math.sin(theta)
    return Mat2(c, -s, s, c)


def cocycle(u, g: Mat2, atol: float = 1e-9) -> float:
    """Shear coordinate of g over the point g.u.

    section(g u)^{-1} g section(u) fixes (1, 0), hence is unipotent
    upper-triangular; the returned scalar is its off-diagonal entry.
    Raises ValueError when g u is too close to the origin for the
    section to be meaningful, or when rounding breaks unipotency.
    """
    u = as_vec(u)
    gu = g.apply(u)
    if gu.sup_norm() < 1e-150 or u.sup_norm() == 0:
        raise ValueError("cocycle undefined: orbit point at the origin")
    h = section(gu).inverse() @ g @ section(u)
    s = h.b
    tol = atol * (1.0 + abs(float(s)))
    if abs(float(h.a) - 1.0) > tol or abs(float(h.d) - 1.0) > tol or abs(float(h.c)) > tol:
        raise ValueError(f"cocycle lost unipotency: residue {h!r}")
    return s


def norm_cocycle_gap(u, g: Mat2, kind: MatrixNorm = MatrixNorm.MAX_ENTRY) -> float:
    """Signed defect ||g|| - |cocycle(u, g)| * (g u * u).

    Bounded over any fixed star-product annulus of orbit points, which
    is what links ball membership ||g|| <= T to the shear coordinate.
    """
    c = cocycle(u, g)
    star = star_product(g.apply(u), u, kind)
    return mat_norm(g, kind) - abs(c) * star
