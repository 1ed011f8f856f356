"""Orbit-sum experiments: convergence, scaling, targets, admissibility."""

import math

import numpy as np
import pytest

from lattice_orbits import fastball
from lattice_orbits.density import AnnulusIndicator, RadialHat
from lattice_orbits.experiments import (
    ExperimentConfig,
    cloud_points,
    constant_independence,
    convergence_study,
    orbit_sum,
    run_is_admissible,
    scaling_sweep,
    shrinking_target_search,
    spec_matrix,
    xi_hat_for_run,
)
from lattice_orbits.lattice import LatticeKind, LatticeSpec, ball_coeffs
from lattice_orbits.linalg import Mat2, MatrixNorm

GOLD = 0.6180339887498949
SL2Z = LatticeSpec(LatticeKind.SL2Z, MatrixNorm.MAX_ENTRY)
QUAT = LatticeSpec(LatticeKind.QUATERNION, MatrixNorm.MAX_ENTRY)
ANNULUS = AnnulusIndicator(1, 2)


def test_config_validation_and_roundtrip():
    cfg = ExperimentConfig(SL2Z, (1.0, GOLD), ANNULUS, [10, 20], alpha=0.25)
    back = ExperimentConfig.from_dict(cfg.as_dict())
    assert back.lattice == SL2Z
    assert back.T_grid == [10.0, 20.0]
    assert back.alpha == 0.25
    with pytest.raises(ValueError):
        ExperimentConfig(SL2Z, (1.0, GOLD), ANNULUS, [10, 10])
    with pytest.raises(ValueError):
        ExperimentConfig(SL2Z, (1.0, GOLD), ANNULUS, [10], alpha=1.0)


def test_orbit_sum_matches_direct_enumeration():
    u = (1.0, math.sqrt(2) - 1.0)
    co = ball_coeffs(SL2Z, 10.0)
    pts = fastball.orbit_points(SL2Z, co, u)
    manual = math.fsum(v for v in ANNULUS.evaluate(pts) if v != 0.0)
    assert orbit_sum(SL2Z, 10.0, ANNULUS, u) == manual == 112.0
    # the debug path re-verifies the norm-cocycle gap bound per hit
    assert orbit_sum(SL2Z, 10.0, ANNULUS, u, debug=True) == manual
    with pytest.raises(ValueError):
        orbit_sum(SL2Z, 0.5, ANNULUS, u)


def test_spec_matrix_embeds_quaternion_rows():
    s2 = math.sqrt(2)
    for row in ball_coeffs(QUAT, 5.0):
        x, y, z, t = (int(v) for v in row)
        a, b, c, d = spec_matrix(QUAT, row)
        assert (a, b, c, d) == pytest.approx(
            (x + s2 * y, z + s2 * t, 3 * (z - s2 * t), x - s2 * y), rel=1e-14)
        assert a * d - b * c == pytest.approx(1.0, abs=1e-10)


def test_convergence_study_structure():
    rep = convergence_study(QUAT, (1.0, 0.0), ANNULUS, [20, 40, 80])
    assert rep.I == pytest.approx(8.0, abs=1e-4)
    assert [r.T for r in rep.rows] == [20.0, 40.0, 80.0]
    assert rep.ratios() == [r.S / (r.T * rep.I) for r in rep.rows]
    assert rep.mu_hat == pytest.approx(2.0 / rep.slope, rel=1e-12)
    assert not rep.warnings
    # precomputed hits give bit-identical sums
    hits = fastball.orbit_hits(QUAT, 80.0, (1.0, 0.0), 1.0, 2.0)
    rep2 = convergence_study(QUAT, (1.0, 0.0), ANNULUS, [20, 40, 80], hits=hits)
    assert [r.S for r in rep2.rows] == [r.S for r in rep.rows]
    payload = rep.payload()
    assert payload["rows"][0]["T"] == 20.0 and "mu_hat" in payload


def test_rational_slope_warning():
    # rationality is only decidable for exact component types
    rep = convergence_study(SL2Z, (2, 1), ANNULUS, [10, 20])
    assert any(w["kind"] == "discrete-orbit" for w in rep.warnings)
    clean = convergence_study(SL2Z, (1.0, GOLD), ANNULUS, [10, 20])
    assert not clean.warnings


def test_constant_independence_spreads():
    reps = [
        convergence_study(QUAT, (1.0, 0.0), f, [20, 40, 80])
        for f in (ANNULUS, RadialHat(1.75, 0.75))
    ]
    out = constant_independence(reps)
    assert len(out["mu_values"]) == 2
    assert out["mu_spread"] >= 0.0 and out["ratio_spread"] >= 0.0
    same = constant_independence([reps[0], reps[0]])
    assert same["mu_spread"] == 0.0 and same["ratio_spread"] == 0.0


def test_scaling_sweep_alpha_zero_reduces_to_orbit_sums():
    grid = [20, 40, 80]
    rep = convergence_study(QUAT, (1.0, 0.0), ANNULUS, grid)
    sc = scaling_sweep(QUAT, (1.0, 0.0), ANNULUS, grid, alpha=0.0, mu_hat=rep.mu_hat)
    for row, crow in zip(sc.rows, rep.rows):
        assert row.W == pytest.approx(crow.S / crow.T, rel=1e-12)
        assert row.normalized == pytest.approx(row.W * rep.mu_hat / 2.0, rel=1e-12)
        assert row.err == pytest.approx(abs(row.W - sc.limit), rel=1e-12)
    assert not sc.slow_convergence
    assert scaling_sweep(QUAT, (1.0, 0.0), ANNULUS, grid, alpha=0.95).slow_convergence


def test_scaling_sweep_alpha_range_warning():
    sc = scaling_sweep(SL2Z, (1.0, GOLD), ANNULUS, [10, 20], alpha=-0.9)
    assert any(w["kind"] == "alpha-out-of-range" for w in sc.warnings)
    ok = scaling_sweep(SL2Z, (1.0, GOLD), ANNULUS, [10, 20], alpha=0.3)
    assert not any(w["kind"] == "alpha-out-of-range" for w in ok.warnings)


def test_shrinking_target_search():
    rep = shrinking_target_search(SL2Z, (1.0, GOLD), (1.0, 1.0), [10, 50, 250])
    dists = [r.distance for r in rep.rows]
    assert rep.nonincreasing
    assert dists[0] > dists[-1] > 0
    assert rep.loglog_slope < 0
    # reported coefficients realize the reported distances
    for row in rep.rows:
        g = Mat2(*row.coeffs)
        gu = g.apply((1.0, GOLD))
        assert max(abs(gu.x - 1.0), abs(gu.y - 1.0)) == pytest.approx(
            row.distance, rel=1e-12)


def test_cloud_points_window():
    coeffs, pts = cloud_points(SL2Z, (1.0, GOLD), 50.0, 1.5)
    assert np.max(np.abs(pts)) <= 1.5
    assert coeffs.shape[0] == pts.shape[0] > 100
    bigger, _ = cloud_points(SL2Z, (1.0, GOLD), 100.0, 1.5)
    assert bigger.shape[0] > coeffs.shape[0]
    with pytest.raises(ValueError):
        cloud_points(SL2Z, (1.0, GOLD), 50.0, 0.0)


def test_xi_hat_windows():
    # float golden-slope direction reduces to z = 0.381966 = [0; 2, 1, 1, ...],
    # so small windows see a_1 = 2 and deep windows see only ones
    assert xi_hat_for_run(ANNULUS, 16.0, (1.0, GOLD)) == 2.0
    assert xi_hat_for_run(ANNULUS, 1000.0, (1.0, GOLD)) == 1.0
    # rational slopes ride the cusp: e^{tau2} / q^2
    assert xi_hat_for_run(ANNULUS, 100.0, (1.0, 0.5)) == pytest.approx(25.0, rel=1e-12)
    assert xi_hat_for_run(ANNULUS, 100.0, (1.0, 0.0)) == pytest.approx(100.0, rel=1e-12)
    with pytest.raises(ValueError):
        xi_hat_for_run(ANNULUS, 0.5, (1.0, GOLD))


def test_run_admissibility():
    assert run_is_admissible(ANNULUS, 100.0, (1.0, GOLD))
    assert not run_is_admissible(ANNULUS, 100.0, (1.0, 0.0))
    # stricter constant raises the bar
    assert not run_is_admissible(ANNULUS, 3.0, (1.0, GOLD), c=16.0)
