"""2x2 linear algebra: norms, star products, sections, cocycles."""

import math
from fractions import Fraction

import numpy as np
import pytest

from lattice_orbits.linalg import (
    Mat2,
    MatrixNorm,
    Vec2,
    as_vec,
    cocycle,
    diagonal_flow,
    mat_norm,
    norm_cocycle_gap,
    rotation,
    section,
    shear,
    star_matrix,
    star_product,
    sup_norm,
)


def test_vec2_basics():
    v = Vec2(3.0, -4.0)
    assert tuple(v) == (3.0, -4.0)
    assert (v + Vec2(1.0, 1.0)) == Vec2(4.0, -3.0)
    assert (v - Vec2(3.0, 0.0)) == Vec2(0.0, -4.0)
    assert v.scale(2) == Vec2(6.0, -8.0)
    assert v.sup_norm() == 4.0
    assert v.l2_norm() == 5.0
    assert as_vec((3.0, -4.0)) == v
    assert sup_norm([1.0, -7.0]) == 7.0


def test_mat2_algebra():
    m = Mat2(1, 2, 3, 4)
    assert m.det() == -2
    assert m.trace() == 5
    assert m.entries() == (1, 2, 3, 4)
    assert (m @ Mat2.identity()) == m
    assert m.apply((1.0, 1.0)) == Vec2(3.0, 7.0)
    assert (-m).entries() == (-1, -2, -3, -4)
    prod = m @ Mat2(0, 1, 1, 0)
    assert prod == Mat2(2, 1, 4, 3)


def test_mat2_inverse():
    g = Mat2(2, 3, 1, 2)  # det 1: the integer fast path
    inv = g.inverse()
    assert inv == Mat2(2, -3, -1, 2)
    assert isinstance(inv.a, int)
    m = Mat2(2.0, 0.0, 0.0, 4.0)
    assert m.inverse() @ m == Mat2(1.0, 0.0, 0.0, 1.0)
    with pytest.raises(ZeroDivisionError):
        Mat2(1, 2, 2, 4).inverse()


def test_mat_norm_against_numpy():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a, b, c, d = rng.uniform(-5, 5, 4)
        m = Mat2(a, b, c, d)
        arr = np.array([[a, b], [c, d]])
        assert mat_norm(m, MatrixNorm.MAX_ENTRY) == np.max(np.abs(arr))
        assert mat_norm(m, MatrixNorm.FROBENIUS) == pytest.approx(
            np.linalg.norm(arr), rel=1e-13
        )
        assert mat_norm(m, MatrixNorm.OPERATOR_2) == pytest.approx(
            np.linalg.norm(arr, 2), rel=1e-12
        )
    with pytest.raises(ValueError):
        mat_norm(Mat2.identity(), "euclidean")


def test_star_matrix_is_rank_one():
    m = star_matrix((2.0, -3.0), (1.0, 5.0))
    assert m.det() == 0.0
    # columns proportional to v, scaled by the entries of u
    assert (m.a, m.c) == (-5.0 * 2.0, -5.0 * -3.0)
    assert (m.b, m.d) == (1.0 * 2.0, 1.0 * -3.0)


def test_star_product_values():
    rng = np.random.default_rng(5)
    for _ in range(100):
        v = tuple(rng.uniform(-4, 4, 2))
        u = tuple(rng.uniform(-4, 4, 2))
        sv, su = max(map(abs, v)), max(map(abs, u))
        assert star_product(v, u, MatrixNorm.MAX_ENTRY) == sv * su
        l2 = math.hypot(*v) * math.hypot(*u)
        assert star_product(v, u, MatrixNorm.FROBENIUS) == pytest.approx(l2, rel=1e-12)
        # operator and Frobenius norms agree on rank-one matrices
        assert star_product(v, u, MatrixNorm.OPERATOR_2) == pytest.approx(
            star_product(v, u, MatrixNorm.FROBENIUS), rel=1e-9
        )


def test_star_product_symmetry_and_homogeneity():
    v, u = (1.5, -0.25), (2.0, 3.0)
    for kind in MatrixNorm:
        s = star_product(v, u, kind)
        assert star_product(u, v, kind) == pytest.approx(s, rel=1e-12)
        assert star_product((3.0 * v[0], 3.0 * v[1]), u, kind) == pytest.approx(
            3.0 * s, rel=1e-12
        )


def test_section_exact_for_fractions():
    v = Vec2(Fraction(3, 2), Fraction(-2, 7))
    P = section(v)
    assert P.det() == 1
    img = P.apply((Fraction(1), Fraction(0)))
    assert (img.x, img.y) == (v.x, v.y)
    assert section((1.0, 0.0)) == Mat2(1.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        section((0, 0))


def test_cocycle_shear_translation():
    u0 = (1.0, 0.0)
    g = section((0.7, -1.2)) @ shear(0.3)
    base = cocycle(u0, g)
    for s in (-2.0, -0.5, 1.25):
        assert cocycle(u0, g @ shear(s)) == pytest.approx(base + s, abs=1e-12)


def test_cocycle_rejects_bad_inputs():
    g = rotation(0.3)
    with pytest.raises(ValueError):
        cocycle((0.0, 0.0), g)
    # non-unimodular matrices do not produce a unipotent residue
    with pytest.raises(ValueError):
        cocycle((1.0, 0.0), Mat2(2.0, 0.0, 0.0, 2.0))


def test_norm_cocycle_gap_identity_and_shear():
    assert norm_cocycle_gap((1.0, 0.0), Mat2.identity()) == 1.0
    # ||h_s|| = max(1, |s|) and |c| * star = |s|, so the gap dies at |s| >= 1
    for s in (1.5, -4.0, 12.0):
        gap = norm_cocycle_gap((1.0, 0.0), shear(s))
        assert gap == pytest.approx(max(1.0, abs(s)) - abs(s), abs=1e-12)
    assert norm_cocycle_gap((1.0, 0.0), shear(0.25)) == pytest.approx(0.75, abs=1e-12)


def test_flow_matrices():
    a = diagonal_flow(0.6)
    assert a.a * a.d == pytest.approx(1.0, rel=1e-15)
    assert a.b == a.c == 0.0
    r = rotation(0.4)
    assert r.det() == pytest.approx(1.0, rel=1e-15)
    assert (r @ rotation(-0.4)).a == pytest.approx(1.0, rel=1e-15)
