"""Exact norm-ball enumeration for two arithmetic lattices in SL(2, R).

Supported groups:

* ``sl2z``: integer matrices of determinant one.
* ``quaternion23``: norm-one units x + y i + z j + t k of the order
  Z<i, j> with i^2 = 2, j^2 = 3, k = ij, embedded via
  [[x + sqrt2 y, z + sqrt2 t], [3 (z - sqrt2 t), x - sqrt2 y]].
  The reduced norm x^2 - 2y^2 - 3z^2 + 6t^2 equals the determinant of
  the embedded matrix, so norm-one units land in SL(2, R); the group
  is cocompact, which is why it appears alongside sl2z in tests.

Membership ||g|| <= T is decided exactly: integer comparisons for
sl2z, sign tests in Z[sqrt2] for the quaternion group.  Floats only
enter through the value of T itself (converted once to a Fraction)
and through reported norm values.

Enumeration here is pure Python and meant for moderate T; the numba
kernels in ``fastball`` cover large balls and defer any borderline
case back to the exact checks in this module.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .linalg import Mat2, MatrixNorm
from .quadratic import ZSqrt2

SQRT2 = math.sqrt(2.0)

_BALL_MAGIC = b"LATB"
_BALL_VERSION = 1


class LatticeKind(str, Enum):
    SL2Z = "sl2z"
    QUATERNION = "quaternion23"


@dataclass(frozen=True)
class LatticeSpec:
    """Which group to enumerate and which matrix norm bounds the ball."""

    kind: LatticeKind = LatticeKind.SL2Z
    norm: MatrixNorm = MatrixNorm.MAX_ENTRY


@dataclass(frozen=True)
class LatticeElement:
    """Group element stored by its integer coordinates.

    sl2z: coeffs = (a, b, c, d), the matrix entries.
    quaternion23: coeffs = (x, y, z, t) in the 1, i, j, k basis.
    """

    kind: LatticeKind
    coeffs: tuple[int, int, int, int]

    @staticmethod
    def identity(kind: LatticeKind) -> LatticeElement:
        if kind == LatticeKind.SL2Z:
            return LatticeElement(kind, (1, 0, 0, 1))
        return LatticeElement(kind, (1, 0, 0, 0))

    def exact_entries(self) -> tuple[ZSqrt2, ZSqrt2, ZSqrt2, ZSqrt2]:
        if self.kind == LatticeKind.SL2Z:
            a, b, c, d = self.coeffs
            return (ZSqrt2(a, 0), ZSqrt2(b, 0), ZSqrt2(c, 0), ZSqrt2(d, 0))
        x, y, z, t = self.coeffs
        return (ZSqrt2(x, y), ZSqrt2(z, t), ZSqrt2(3 * z, -3 * t), ZSqrt2(x, -y))

    def matrix(self) -> Mat2:
        e = self.exact_entries()
        return Mat2(float(e[0]), float(e[1]), float(e[2]), float(e[3]))

    def det_exact(self) -> int:
        """Determinant of the embedded matrix; 1 for genuine elements."""
        if self.kind == LatticeKind.SL2Z:
            a, b, c, d = self.coeffs
            return a * d - b * c
        x, y, z, t = self.coeffs
        return x * x - 2 * y * y - 3 * z * z + 6 * t * t

    def multiply(self, other: LatticeElement) -> LatticeElement:
        if self.kind != other.kind:
            raise ValueError("mixed lattice kinds")
        if self.kind == LatticeKind.SL2Z:
            a1, b1, c1, d1 = self.coeffs
            a2, b2, c2, d2 = other.coeffs
            return LatticeElement(
                self.kind,
                (
                    a1 * a2 + b1 * c2,
                    a1 * b2 + b1 * d2,
                    c1 * a2 + d1 * c2,
                    c1 * b2 + d1 * d2,
                ),
            )
        x1, y1, z1, t1 = self.coeffs
        x2, y2, z2, t2 = other.coeffs
        return LatticeElement(
            self.kind,
            (
                x1 * x2 + 2 * y1 * y2 + 3 * z1 * z2 - 6 * t1 * t2,
                x1 * y2 + y1 * x2 - 3 * z1 * t2 + 3 * t1 * z2,
                x1 * z2 + 2 * y1 * t2 + z1 * x2 - 2 * t1 * y2,
                x1 * t2 + y1 * z2 - z1 * y2 + t1 * x2,
            ),
        )

    def inverse(self) -> LatticeElement:
        if self.kind == LatticeKind.SL2Z:
            a, b, c, d = self.coeffs
            return LatticeElement(self.kind, (d, -b, -c, a))
        x, y, z, t = self.coeffs  # conjugate of a norm-one unit
        return LatticeElement(self.kind, (x, -y, -z, -t))

    def __neg__(self) -> LatticeElement:
        return LatticeElement(self.kind, tuple(-c for c in self.coeffs))

    def norm(self, kind: MatrixNorm = MatrixNorm.MAX_ENTRY) -> float:
        e = [float(v) for v in self.exact_entries()]
        if kind == MatrixNorm.MAX_ENTRY:
            return max(abs(v) for v in e)
        q = sum(v * v for v in e)
        if kind == MatrixNorm.FROBENIUS:
            return math.sqrt(q)
        disc = max(q * q - 4.0, 0.0)  # det = 1
        return math.sqrt((q + math.sqrt(disc)) / 2.0)

    def norm_within(self, T, kind: MatrixNorm) -> bool:
        """Exact test ||g|| <= T."""
        Tf = Fraction(T)
        e = self.exact_entries()
        if kind == MatrixNorm.MAX_ENTRY:
            return all(v.abs_le(Tf) for v in e)
        q = ZSqrt2(0, 0)
        for v in e:
            q = q + v * v
        if kind == MatrixNorm.FROBENIUS:
            return q.compare_fraction(Tf * Tf) <= 0
        if Tf <= 0:
            return False
        return q.compare_fraction(Tf * Tf + 1 / (Tf * Tf)) <= 0


def _bezout_column(a: int, c: int) -> tuple[int, int]:
    """Some (b0, d0) with a*d0 - c*b0 = 1, for gcd(a, c) = 1."""
    g, x, y = _ext_gcd(a, c)
    # a x + c y = 1 -> d0 = x, b0 = -y
    return -y, x


def _ext_gcd(a: int, c: int) -> tuple[int, int, int]:
    old_r, r = a, c
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _interval_abs_le(b0: int, step: int, bound: int) -> tuple[int, int] | None:
    """Integer k-range with |b0 + k*step| <= bound; None means empty.

    step = 0 degenerates to a constraint on b0 alone, returned as a
    huge interval for the caller to intersect away.
    """
    if step == 0:
        return (-(1 << 62), (1 << 62)) if abs(b0) <= bound else None
    if step < 0:  # |b0 + k step| = |(-b0) + k (-step)|
        b0, step = -b0, -step
    lo = -((bound + b0) // step)  # ceil((-bound - b0) / step)
    hi = (bound - b0) // step
    if lo > hi:
        return None
    return lo, hi


def _sl2z_ball_max(N: int):
    for a in range(-N, N + 1):
        for c in range(-N, N + 1):
            if math.gcd(a, c) != 1:
                continue
            b0, d0 = _bezout_column(a, c)
            rb = _interval_abs_le(b0, a, N)
            if rb is None:
                continue
            rd = _interval_abs_le(d0, c, N)
            if rd is None:
                continue
            lo, hi = max(rb[0], rd[0]), min(rb[1], rd[1])
            for k in range(lo, hi + 1):
                yield (a, b0 + k * a, c, d0 + k * c)


def _sl2z_ball_quadratic(qmax: Fraction):
    """Columns first, then the det-1 line, cut by a^2+b^2+c^2+d^2 <= qmax."""
    if qmax < 2:
        return
    amax = math.isqrt(math.floor(qmax - 1))
    for a in range(-amax, amax + 1):
        cmax = math.isqrt(math.floor(qmax - 1 - a * a))
        for c in range(-cmax, cmax + 1):
            if math.gcd(a, c) != 1:
                continue
            b0, d0 = _bezout_column(a, c)
            A = a * a + c * c
            B = 2 * (a * b0 + c * d0)
            C = Fraction(A + b0 * b0 + d0 * d0) - qmax
            disc = Fraction(B * B) - 4 * A * C
            if disc < 0:
                continue
            sq = math.sqrt(float(disc))
            lo = math.ceil((-B - sq) / (2 * A))
            hi = math.floor((-B + sq) / (2 * A))

            def q_of(k: int) -> Fraction:
                return A * k * k + B * k + C

            while q_of(lo - 1) <= 0:
                lo -= 1
            while lo <= hi and q_of(lo) > 0:
                lo += 1
            while q_of(hi + 1) <= 0:
                hi += 1
            while hi >= lo and q_of(hi) > 0:
                hi -= 1
            for k in range(lo, hi + 1):
                yield (a, b0 + k * a, c, d0 + k * c)


def _sl2z_ball(T, norm: MatrixNorm):
    Tf = Fraction(T)
    if norm == MatrixNorm.MAX_ENTRY:
        if Tf < 1:
            return
        yield from _sl2z_ball_max(math.floor(Tf))
    elif norm == MatrixNorm.FROBENIUS:
        yield from _sl2z_ball_quadratic(Tf * Tf)
    elif norm == MatrixNorm.OPERATOR_2:
        if Tf < 1:
            return
        yield from _sl2z_ball_quadratic(Tf * Tf + 1 / (Tf * Tf))
    else:
        raise ValueError(f"unknown norm {norm!r}")


def quaternion_box_bounds(T) -> tuple[int, int, int]:
    """Integer bounds |x| <= X, |y| <= Y, |z| <= Z implied by ||g|| <= T.

    From |x + sqrt2 y| <= T and |x - sqrt2 y| <= T: |x| <= T and
    |y| <= T/sqrt2.  From |z + sqrt2 t| <= T and |3(z - sqrt2 t)| <= T:
    |z| <= 2T/3.  Valid for every norm kind here because max-entry is
    the smallest of the three.
    """
    Tf = Fraction(T)
    if Tf < 1:
        return -1, -1, -1
    X = math.floor(Tf)
    Y = math.isqrt(math.floor(Tf * Tf / 2))
    Z = math.floor(2 * Tf / 3)
    return X, Y, Z


def _quaternion_candidates(X: int, Y: int, Z: int):
    """Integer solutions of x^2 - 2y^2 - 3z^2 + 6t^2 = 1 in the box.

    t is recovered from the other three coordinates; most (x, y, z)
    triples die on the mod-6 test before any isqrt.
    """
    for x in range(-X, X + 1):
        for y in range(-Y, Y + 1):
            for z in range(-Z, Z + 1):
                base = 1 - x * x + 2 * y * y + 3 * z * z
                if base < 0 or base % 6:
                    continue
                tsq = base // 6
                t0 = math.isqrt(tsq)
                if t0 * t0 != tsq:
                    continue
                if t0 == 0:
                    yield (x, y, z, 0)
                else:
                    yield (x, y, z, -t0)
                    yield (x, y, z, t0)


def _quaternion_ball(T, norm: MatrixNorm):
    X, Y, Z = quaternion_box_bounds(T)
    for coeffs in _quaternion_candidates(X, Y, Z):
        g = LatticeElement(LatticeKind.QUATERNION, coeffs)
        if g.norm_within(T, norm):
            yield coeffs


def ball(spec: LatticeSpec, T, method: str = "auto") -> list[LatticeElement]:
    """All group elements with ||g|| <= T, sorted by coordinate tuple.

    method: "exact" forces the pure-Python path, "fast" the numba
    kernels (still exact: borderline candidates are re-checked here),
    "auto" picks by T.
    """
    coeffs = ball_coeffs(spec, T, method)
    return [LatticeElement(spec.kind, tuple(int(v) for v in row)) for row in coeffs]


def ball_coeffs(spec: LatticeSpec, T, method: str = "auto") -> np.ndarray:
    """Ball contents as an (n, 4) int64 array in canonical order."""
    if method not in ("auto", "exact", "fast"):
        raise ValueError(f"unknown method {method!r}")
    use_fast = method == "fast" or (method == "auto" and float(T) > 64.0)
    if use_fast:
        from . import fastball

        arr = fastball.ball_coeffs_fast(spec, T)
    else:
        if spec.kind == LatticeKind.SL2Z:
            rows = list(_sl2z_ball(T, spec.norm))
        else:
            rows = list(_quaternion_ball(T, spec.norm))
        arr = np.array(sorted(rows), dtype=np.int64).reshape(-1, 4)
    return arr


def ball_count(spec: LatticeSpec, T, method: str = "auto") -> int:
    return int(ball_coeffs(spec, T, method).shape[0])


def embed_array(kind: LatticeKind, coeffs: np.ndarray) -> np.ndarray:
    """Float matrices for an (n, 4) coefficient array, shape (n, 2, 2)."""
    coeffs = np.asarray(coeffs, dtype=np.float64).reshape(-1, 4)
    out = np.empty((coeffs.shape[0], 2, 2))
    if kind == LatticeKind.SL2Z:
        out[:, 0, 0] = coeffs[:, 0]
        out[:, 0, 1] = coeffs[:, 1]
        out[:, 1, 0] = coeffs[:, 2]
        out[:, 1, 1] = coeffs[:, 3]
    else:
        x, y, z, t = coeffs.T
        out[:, 0, 0] = x + SQRT2 * y
        out[:, 0, 1] = z + SQRT2 * t
        out[:, 1, 0] = 3.0 * (z - SQRT2 * t)
        out[:, 1, 1] = x - SQRT2 * y
    return out


_KIND_CODE = {LatticeKind.SL2Z: 0, LatticeKind.QUATERNION: 1}
_NORM_CODE = {MatrixNorm.MAX_ENTRY: 0, MatrixNorm.FROBENIUS: 1, MatrixNorm.OPERATOR_2: 2}
_CODE_KIND = {v: k for k, v in _KIND_CODE.items()}
_CODE_NORM = {v: k for k, v in _NORM_CODE.items()}
_HEADER = struct.Struct("<4sHBBdQ")


def save_ball(path, spec: LatticeSpec, T: float, coeffs: np.ndarray) -> None:
    """Write a ball to the little-endian binary cache format.

    Layout: magic "LATB", u16 version, u8 kind, u8 norm, f64 T,
    u64 count, then count * 4 little-endian int64 coordinates.
    """
    coeffs = np.ascontiguousarray(coeffs, dtype="<i8").reshape(-1, 4)
    header = _HEADER.pack(
        _BALL_MAGIC,
        _BALL_VERSION,
        _KIND_CODE[spec.kind],
        _NORM_CODE[spec.norm],
        float(T),
        coeffs.shape[0],
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(coeffs.tobytes())


def load_ball(path) -> tuple[LatticeSpec, float, np.ndarray]:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) != _HEADER.size:
            raise ValueError("truncated ball cache header")
        magic, version, kind_code, norm_code, T, count = _HEADER.unpack(raw)
        if magic != _BALL_MAGIC:
            raise ValueError("not a ball cache file")
        if version != _BALL_VERSION:
            raise ValueError(f"unsupported ball cache version {version}")
        body = fh.read(count * 4 * 8)
    if len(body) != count * 4 * 8:
        raise ValueError("truncated ball cache body")
    coeffs = np.frombuffer(body, dtype="<i8").astype(np.int64).reshape(-1, 4)
    spec = LatticeSpec(_CODE_KIND[kind_code], _CODE_NORM[norm_code])
    return spec, T, coeffs


def verify_group_axioms(
    spec: LatticeSpec, T: float = 3.0, n_samples: int = 300, seed: int = 0
) -> dict:
    """Exact spot checks that ball elements form a group under multiply.

    Products, inverses and (for the quaternion order) the matrix
    embedding are verified in integer / Z[sqrt2] arithmetic; nothing
    here depends on floats.  Returns a report dict with per-check
    pass counts and an overall flag.
    """
    rng = np.random.default_rng(seed)
    elements = ball(spec, T, method="exact")
    if not elements:
        raise ValueError("empty ball; raise T")
    n = len(elements)
    idx = rng.integers(0, n, size=(n_samples, 3))
    ident = LatticeElement.identity(spec.kind)
    checks = {
        "det_one": 0,
        "closure_det": 0,
        "associativity": 0,
        "inverse": 0,
        "embedding_homomorphism": 0,
    }
    for i, j, k in idx:
        g, h, w = elements[int(i)], elements[int(j)], elements[int(k)]
        checks["det_one"] += g.det_exact() == 1
        gh = g.multiply(h)
        checks["closure_det"] += gh.det_exact() == 1
        checks["associativity"] += gh.multiply(w) == g.multiply(h.multiply(w))
        checks["inverse"] += g.multiply(g.inverse()) == ident
        pl, pr = gh.exact_entries(), _entrywise_product(g, h)
        checks["embedding_homomorphism"] += pl == pr
    report = {name: (count, n_samples) for name, count in checks.items()}
    report["identity_in_ball"] = ident in elements
    report["ok"] = bool(report["identity_in_ball"]) and all(
        c == n_samples for c in checks.values()
    )
    return report


def _entrywise_product(g: LatticeElement, h: LatticeElement):
    """Matrix product of the embedded matrices, exactly in Z[sqrt2]."""
    a1, b1, c1, d1 = g.exact_entries()
    a2, b2, c2, d2 = h.exact_entries()
    return (
        a1 * a2 + b1 * c2,
        a1 * b2 + b1 * d2,
        c1 * a2 + d1 * c2,
        c1 * b2 + d1 * d2,
    )
