"""Exact arithmetic: the ring Z[sqrt2] and real quadratic surds."""

import math
from fractions import Fraction

import pytest

from lattice_orbits.quadratic import Surd, ZSqrt2


def test_zsqrt2_ring_operations():
    a = ZSqrt2(3, -2)
    b = ZSqrt2(-1, 4)
    assert float(a) == pytest.approx(3 - 2 * math.sqrt(2))
    assert a + b == ZSqrt2(2, 2)
    assert a - b == ZSqrt2(4, -6)
    assert a * b == ZSqrt2(-19, 14)
    assert a * 3 == ZSqrt2(9, -6)
    assert -a == ZSqrt2(-3, 2)


def test_zsqrt2_norm_and_conjugate():
    a = ZSqrt2(3, -2)
    assert a.conjugate() == ZSqrt2(3, 2)
    assert a.norm() == 1
    assert ZSqrt2(1, 1).norm() == -1
    # norm is multiplicative
    b = ZSqrt2(-1, 4)
    assert (a * b).norm() == a.norm() * b.norm()


def test_zsqrt2_sign():
    assert ZSqrt2(3, -2).sign() == 1
    assert ZSqrt2(-3, 2).sign() == -1
    assert ZSqrt2(0, 0).sign() == 0
    # cases where the float value is a near-cancellation
    assert ZSqrt2(-665857, 470832).sign() == -1
    assert ZSqrt2(665857, -470832).sign() == 1


def test_zsqrt2_compare_fraction_exact():
    x = ZSqrt2(1, 1)  # 1 + sqrt2 ~ 2.41421
    assert x.compare_fraction(Fraction(5, 2)) == -1
    assert x.compare_fraction(Fraction(12, 5)) == 1
    assert x.compare_fraction(Fraction(29, 12)) == -1
    # sqrt2 against tight rational brackets
    s = ZSqrt2(0, 1)
    assert s.compare_fraction(Fraction(141421356, 100000000)) == 1
    assert s.compare_fraction(Fraction(141421357, 100000000)) == -1


def test_zsqrt2_abs_le_two_sided():
    # the bound must cut on both sides, including exact boundary hits
    assert ZSqrt2(2, 0).abs_le(Fraction(2))
    assert ZSqrt2(-2, 0).abs_le(Fraction(2))
    assert not ZSqrt2(3, 0).abs_le(Fraction(2))
    assert not ZSqrt2(-3, 0).abs_le(Fraction(2))
    assert not ZSqrt2(0, -2).abs_le(Fraction(2))
    assert ZSqrt2(-1, -1).abs_le(Fraction(5, 2))
    assert not ZSqrt2(-1, -1).abs_le(Fraction(2))


def test_surd_golden_identities():
    z = Surd(-1, 1, 2, 5)  # (sqrt5 - 1) / 2
    assert float(z) == pytest.approx((math.sqrt(5) - 1) / 2)
    assert z * z + z == Surd.from_rational(1)
    assert z.inverse() == z + 1
    assert (1 / z) == z + 1
    assert z / z == Surd.from_rational(1)


def test_surd_root_reduction():
    r = Surd.sqrt(8)
    assert float(r) == pytest.approx(2 * math.sqrt(2))
    assert not r.is_rational()
    assert Surd.sqrt(9).is_rational()
    assert Surd.sqrt(9).as_fraction() == 3
    assert Surd.sqrt(0).as_fraction() == 0


def test_surd_rational_embedding():
    q = Surd.from_rational(Fraction(3, 7))
    assert q.is_rational()
    assert q.as_fraction() == Fraction(3, 7)
    assert q + Fraction(4, 7) == Surd.from_rational(1)
    with pytest.raises(ValueError):
        Surd(0, 1, 2, 5).as_fraction()


def test_surd_ordering_and_floor():
    z = Surd(-1, 1, 2, 5)
    assert z < Fraction(2, 3)
    assert z > Fraction(3, 5)
    assert Surd(-1, 1, 1, 2).floor() == 0   # sqrt2 - 1
    assert Surd(-1, -1, 1, 2).floor() == -3  # -1 - sqrt2
    assert Surd.from_rational(Fraction(-7, 2)).floor() == -4
    assert Surd.from_rational(3).floor() == 3


def test_surd_mixed_arithmetic():
    z = Surd(-1, 1, 1, 2)  # sqrt2 - 1
    w = 1 - z
    assert float(w) == pytest.approx(2 - math.sqrt(2))
    assert 2 * z + 2 == Surd.sqrt(2) * 2
    assert abs(-z) == z
    # products of conjugate surds collapse to rationals
    assert (z * (Surd.sqrt(2) + 1)).is_rational()
    assert (z * (Surd.sqrt(2) + 1)).as_fraction() == 1


def test_surd_hash_consistency():
    a = Surd(2, 2, 2, 2)  # 1 + sqrt2 after reduction
    b = Surd(1, 1, 1, 2)
    assert a == b
    assert hash(a) == hash(b)
