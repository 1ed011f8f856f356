"""Exact arithmetic over Z[sqrt(2)] and real quadratic surds.

Nothing in this module touches floating point except on explicit
conversion.  Comparisons reduce to integer sign tests via math.isqrt,
so norm-ball membership and continued fractions of quadratic
irrationals stay exact at any depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

def _float_quadratic(p: int, q: int, r: int, d: int) -> float:
    """Float of (p + q*sqrt(d))/r without catastrophic cancellation.

    Naive evaluation loses every digit when p ~ -q*sqrt(d), which is
    the normal shape of continued-fraction error terms.  Bracket
    q*sqrt(d) between consecutive multiples of 2^-shift and widen
    shift until the bracket is tight relative to the value itself;
    the final division is correctly rounded by Fraction.
    """
    if q == 0:
        return float(Fraction(p, r))
    shift = 32
    while True:
        s = math.isqrt(d << (2 * shift))
        lo = p * (1 << shift) + q * (s if q > 0 else s + 1)
        hi = p * (1 << shift) + q * (s + 1 if q > 0 else s)
        if (hi - lo) << 54 <= max(abs(lo), abs(hi)):
            return float(Fraction(lo + hi, (2 * r) << shift))
        shift *= 2


def _sign_pair(a: int, b: int, d: int) -> int:
    """Sign of a + b*sqrt(d) for integers a, b and d >= 0."""
    if d == 0 or b == 0:
        return (a > 0) - (a < 0)
    if a >= 0 and b >= 0:
        return 1 if (a or b) else 0
    if a <= 0 and b <= 0:
        return -1
    # Opposite signs: compare a^2 with d*b^2 on the positive side.
    if a > 0:  # b < 0, positive iff a^2 > d b^2
        return (a * a > d * b * b) - (a * a < d * b * b)
    return (d * b * b > a * a) - (d * b * b < a * a)  # a < 0, b > 0


@dataclass(frozen=True)
class ZSqrt2:
    """The ring element a + b*sqrt(2) with integer a, b."""

    a: int
    b: int

    def __add__(self, other: ZSqrt2 | int) -> ZSqrt2:
        if isinstance(other, int):
            return ZSqrt2(self.a + other, self.b)
        return ZSqrt2(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self) -> ZSqrt2:
        return ZSqrt2(-self.a, -self.b)

    def __sub__(self, other: ZSqrt2 | int) -> ZSqrt2:
        return self + (-other if isinstance(other, ZSqrt2) else -other)

    def __mul__(self, other: ZSqrt2 | int) -> ZSqrt2:
        if isinstance(other, int):
            return ZSqrt2(self.a * other, self.b * other)
        return ZSqrt2(
            self.a * other.a + 2 * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    __rmul__ = __mul__

    def conjugate(self) -> ZSqrt2:
        return ZSqrt2(self.a, -self.b)

    def norm(self) -> int:
        return self.a * self.a - 2 * self.b * self.b

    def sign(self) -> int:
        return _sign_pair(self.a, self.b, 2)

    def __float__(self) -> float:
        return _float_quadratic(self.a, self.b, 1, 2)

    def compare_fraction(self, q: Fraction) -> int:
        """Sign of self - q, exactly."""
        num, den = q.numerator, q.denominator
        return _sign_pair(self.a * den - num, self.b * den, 2)

    def abs_le(self, bound: Fraction) -> bool:
        """|self| <= bound, exactly."""
        return self.compare_fraction(bound) <= 0 and self.compare_fraction(-bound) >= 0

    def __le__(self, other: ZSqrt2 | int) -> bool:
        return (self - other).sign() <= 0

    def __lt__(self, other: ZSqrt2 | int) -> bool:
        return (self - other).sign() < 0


def _reduce_root(d: int, q: int) -> tuple[int, int]:
    """Pull square factors of d into q, so q*sqrt(d) keeps its value."""
    if d == 0 or q == 0:
        return 0, 0
    s = math.isqrt(d)
    if s * s == d:
        return 0, q * s
    # Strip small square factors; d stays modest in this codebase.
    f = 2
    while f * f <= d:
        while d % (f * f) == 0:
            d //= f * f
            q *= f
        f += 1
    return d, q


class Surd:
    """Real number (p + q*sqrt(d)) / r with integer p, q, r and d >= 0.

    Values are normalized so r > 0 and gcd(p, q, r) = 1, with square
    factors of d absorbed into q (d = 0 encodes a rational).  Supports
    exact field arithmetic, exact floor and exact comparison against
    rationals, which is all a continued-fraction loop needs.
    """

    __slots__ = ("p", "q", "r", "d")

    def __init__(self, p: int, q: int, r: int, d: int):
        if r == 0:
            raise ZeroDivisionError("surd with zero denominator")
        d, q = _reduce_root(d, q)
        if d == 0:  # perfect squares reduce to the rational part
            p, q = p + q, 0
        if q == 0:
            d = 0
        if r < 0:
            p, q, r = -p, -q, -r
        g = math.gcd(math.gcd(abs(p), abs(q)), r)
        if g > 1:
            p, q, r = p // g, q // g, r // g
        self.p, self.q, self.r, self.d = p, q, r, d

    @classmethod
    def from_rational(cls, x: int | Fraction) -> Surd:
        f = Fraction(x)
        return cls(f.numerator, 0, f.denominator, 0)

    @classmethod
    def sqrt(cls, n: int) -> Surd:
        if n < 0:
            raise ValueError("negative radicand")
        return cls(0, 1, 1, n)

    def is_rational(self) -> bool:
        return self.d == 0 or self.q == 0

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not rational")
        return Fraction(self.p, self.r)

    def _coerce(self, other) -> Surd | None:
        if isinstance(other, Surd):
            if self.d and other.d and self.d != other.d:
                return None
            return other
        if isinstance(other, (int, Fraction)):
            return Surd.from_rational(other)
        return None

    def __add__(self, other) -> Surd:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self.d or o.d
        return Surd(self.p * o.r + o.p * self.r, self.q * o.r + o.q * self.r, self.r * o.r, d)

    __radd__ = __add__

    def __neg__(self) -> Surd:
        return Surd(-self.p, -self.q, self.r, self.d)

    def __sub__(self, other) -> Surd:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> Surd:
        return (-self) + other

    def __mul__(self, other) -> Surd:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self.d or o.d
        return Surd(
            self.p * o.p + self.q * o.q * d,
            self.p * o.q + self.q * o.p,
            self.r * o.r,
            d,
        )

    __rmul__ = __mul__

    def inverse(self) -> Surd:
        # 1 / ((p + q sqrt d)/r) = r (p - q sqrt d) / (p^2 - q^2 d)
        den = self.p * self.p - self.q * self.q * self.d
        if den == 0:
            if self.p == 0 and self.q == 0:
                raise ZeroDivisionError("inverse of zero")
            raise ZeroDivisionError("degenerate surd")
        return Surd(self.r * self.p, -self.r * self.q, den, self.d)

    def __truediv__(self, other) -> Surd:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other) -> Surd:
        return self.inverse() * other

    def sign(self) -> int:
        s = _sign_pair(self.p, self.q, self.d)
        return s  # r > 0 by normalization

    def compare(self, other) -> int:
        diff = self - other
        if diff is NotImplemented:
            raise TypeError(f"cannot compare Surd with {type(other)!r}")
        return diff.sign()

    def __lt__(self, other) -> bool:
        return self.compare(other) < 0

    def __le__(self, other) -> bool:
        return self.compare(other) <= 0

    def __gt__(self, other) -> bool:
        return self.compare(other) > 0

    def __ge__(self, other) -> bool:
        return self.compare(other) >= 0

    def __eq__(self, other) -> bool:
        try:
            return self.compare(other) == 0
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.as_fraction())
        return hash((self.p, self.q, self.r, self.d))

    def __abs__(self) -> Surd:
        return -self if self.sign() < 0 else self

    def __float__(self) -> float:
        return _float_quadratic(self.p, self.q, self.r, self.d)

    def floor(self) -> int:
        """Exact floor, independent of floating-point rounding."""
        if self.is_rational():
            return self.p // self.r
        n = math.floor(float(self))
        while self.compare(n) < 0:  # n too big
            n -= 1
        while self.compare(n + 1) >= 0:  # n + 1 still below or equal
            n += 1
        return n

    def __repr__(self) -> str:
        if self.is_rational():
            return f"Surd({Fraction(self.p, self.r)})"
        return f"Surd(({self.p} + {self.q}*sqrt({self.d}))/{self.r})"
