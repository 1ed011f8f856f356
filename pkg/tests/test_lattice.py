"""Exact norm-ball enumeration for the two lattices."""

import os
from fractions import Fraction

import numpy as np
import pytest

from lattice_orbits.lattice import (
    LatticeElement,
    LatticeKind,
    LatticeSpec,
    ball,
    ball_coeffs,
    ball_count,
    embed_array,
    load_ball,
    quaternion_box_bounds,
    save_ball,
    verify_group_axioms,
)
from lattice_orbits.linalg import MatrixNorm

# counts cross-checked against the exhaustive box oracle (tests/test_acceptance.py)
BALL_COUNTS = {
    (LatticeKind.SL2Z, MatrixNorm.MAX_ENTRY): {1: 20, 2: 52, 5: 308, 10: 1012, 30: 8884},
    (LatticeKind.SL2Z, MatrixNorm.FROBENIUS): {1: 0, 2: 20, 5: 132, 10: 580, 30: 5156},
    (LatticeKind.SL2Z, MatrixNorm.OPERATOR_2): {1: 4, 2: 20, 5: 132, 10: 580, 30: 5156},
    (LatticeKind.QUATERNION, MatrixNorm.MAX_ENTRY): {1: 2, 2: 2, 5: 18, 10: 78, 30: 766},
    (LatticeKind.QUATERNION, MatrixNorm.FROBENIUS): {1: 0, 2: 2, 5: 10, 10: 38, 30: 454},
    (LatticeKind.QUATERNION, MatrixNorm.OPERATOR_2): {1: 2, 2: 2, 5: 10, 10: 38, 30: 454},
}


@pytest.mark.parametrize("kind", list(LatticeKind))
@pytest.mark.parametrize("norm", list(MatrixNorm))
def test_ball_counts_frozen(kind, norm):
    spec = LatticeSpec(kind, norm)
    want = BALL_COUNTS[(kind, norm)]
    for T in (1, 2, 5, 10):
        assert ball_count(spec, T, method="exact") == want[T]


def test_ball_rows_are_canonical_and_unimodular():
    for kind in LatticeKind:
        spec = LatticeSpec(kind, MatrixNorm.MAX_ENTRY)
        rows = ball_coeffs(spec, 6.0, method="exact")
        assert rows.dtype == np.int64
        as_tuples = [tuple(r) for r in rows]
        assert as_tuples == sorted(as_tuples)
        assert len(set(as_tuples)) == len(as_tuples)
        for r in as_tuples:
            assert LatticeElement(kind, r).det_exact() == 1


def test_ball_closed_under_inverse_and_negation():
    for kind in LatticeKind:
        spec = LatticeSpec(kind, MatrixNorm.FROBENIUS)
        elements = set(ball(spec, 8.0, method="exact"))
        for g in elements:
            assert g.inverse() in elements
            assert -g in elements


def test_quaternion_embedding_is_a_homomorphism():
    spec = LatticeSpec(LatticeKind.QUATERNION, MatrixNorm.MAX_ENTRY)
    elements = ball(spec, 5.0, method="exact")
    rng = np.random.default_rng(1)
    for i, j in rng.integers(0, len(elements), size=(60, 2)):
        g, h = elements[int(i)], elements[int(j)]
        gh = g.multiply(h)
        a1, b1, c1, d1 = g.exact_entries()
        a2, b2, c2, d2 = h.exact_entries()
        assert gh.exact_entries() == (
            a1 * a2 + b1 * c2,
            a1 * b2 + b1 * d2,
            c1 * a2 + d1 * c2,
            c1 * b2 + d1 * d2,
        )
        assert g.multiply(g.inverse()) == LatticeElement.identity(spec.kind)


def test_norm_within_exact_boundaries():
    g = LatticeElement(LatticeKind.SL2Z, (1, 1, 0, 1))
    assert g.norm_within(1, MatrixNorm.MAX_ENTRY)
    assert not g.norm_within(Fraction(999, 1000), MatrixNorm.MAX_ENTRY)
    ident = LatticeElement(LatticeKind.SL2Z, (1, 0, 0, 1))
    # ||I||_F = sqrt2: rational thresholds must split exactly
    assert not ident.norm_within(Fraction(141421356, 10**8), MatrixNorm.FROBENIUS)
    assert ident.norm_within(Fraction(141421357, 10**8), MatrixNorm.FROBENIUS)
    # operator norm of the unit shear is the golden ratio
    assert not g.norm_within(Fraction(1618033, 10**6), MatrixNorm.OPERATOR_2)
    assert g.norm_within(Fraction(1618035, 10**6), MatrixNorm.OPERATOR_2)


def test_quaternion_norm_within_irrational_entries():
    g = LatticeElement(LatticeKind.QUATERNION, (1, 1, 1, 0))  # entries 1 +- sqrt2, 3
    m = max(abs(float(e)) for e in g.exact_entries())
    assert m == 3.0
    assert g.norm_within(3, MatrixNorm.MAX_ENTRY)
    assert not g.norm_within(Fraction(29999999, 10**7), MatrixNorm.MAX_ENTRY)


def test_embed_array_matches_exact_entries():
    for kind in LatticeKind:
        spec = LatticeSpec(kind, MatrixNorm.MAX_ENTRY)
        rows = ball_coeffs(spec, 4.0, method="exact")
        mats = embed_array(kind, rows)
        assert mats.shape == (rows.shape[0], 2, 2)
        dets = mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
        assert np.max(np.abs(dets - 1.0)) < 1e-12
        g = LatticeElement(kind, tuple(int(v) for v in rows[0]))
        exact = [float(e) for e in g.exact_entries()]
        assert np.allclose(mats[0].ravel(), exact, rtol=0, atol=1e-14)


def test_exact_and_fast_methods_agree():
    for kind in LatticeKind:
        for norm in MatrixNorm:
            spec = LatticeSpec(kind, norm)
            slow = ball_coeffs(spec, 12.0, method="exact")
            fast = ball_coeffs(spec, 12.0, method="fast")
            assert np.array_equal(slow, fast)


def test_ball_method_validation():
    spec = LatticeSpec(LatticeKind.SL2Z, MatrixNorm.MAX_ENTRY)
    with pytest.raises(ValueError):
        ball_coeffs(spec, 5.0, method="approximate")
    assert ball_count(spec, 0.5) == 0


def test_ball_cache_roundtrip(tmp_path):
    spec = LatticeSpec(LatticeKind.QUATERNION, MatrixNorm.FROBENIUS)
    coeffs = ball_coeffs(spec, 7.0)
    path = os.path.join(tmp_path, "ball.latb")
    save_ball(path, spec, 7.0, coeffs)
    spec2, T2, arr = load_ball(path)
    assert spec2 == spec
    assert T2 == 7.0
    assert np.array_equal(arr, coeffs)


def test_ball_cache_rejects_corruption(tmp_path):
    spec = LatticeSpec(LatticeKind.SL2Z, MatrixNorm.MAX_ENTRY)
    coeffs = ball_coeffs(spec, 3.0)
    path = os.path.join(tmp_path, "ball.latb")
    save_ball(path, spec, 3.0, coeffs)
    raw = open(path, "rb").read()
    open(path, "wb").write(b"XXXX" + raw[4:])
    with pytest.raises(ValueError):
        load_ball(path)
    open(path, "wb").write(raw[:-8])
    with pytest.raises(ValueError):
        load_ball(path)
    open(path, "wb").write(raw[:10])
    with pytest.raises(ValueError):
        load_ball(path)


def test_verify_group_axioms_reports():
    rep = verify_group_axioms(LatticeSpec(LatticeKind.SL2Z, MatrixNorm.MAX_ENTRY),
                              T=3.0, n_samples=80, seed=1)
    assert rep["ok"]
    assert rep["identity_in_ball"]
    assert rep["associativity"] == (80, 80)
    with pytest.raises(ValueError):
        verify_group_axioms(LatticeSpec(LatticeKind.SL2Z, MatrixNorm.FROBENIUS), T=0.5)


def test_quaternion_box_bounds_cover_growth():
    x1, y1, z1 = quaternion_box_bounds(5.0)
    x2, y2, z2 = quaternion_box_bounds(50.0)
    assert min(x1, y1, z1) > 0
    assert x2 > x1 and y2 > y1 and z2 > z1
