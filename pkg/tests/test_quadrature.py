"""Adaptive panel quadrature in sup-norm polar and cartesian frames."""

import math

import numpy as np
import pytest
from scipy.special import erf

from lattice_orbits.quadrature import (
    QuadratureError,
    arc_of,
    integrate_polar,
    integrate_rect,
    polar_points,
    square_boundary,
)


def test_square_boundary_walks_the_unit_square():
    phi = np.linspace(0.0, 8.0, 1601, endpoint=False)
    x, y = square_boundary(phi)
    assert np.max(np.abs(np.maximum(np.abs(x), np.abs(y)) - 1.0)) == 0.0
    # unit speed along the interior of one edge
    phi_e = np.linspace(0.1, 1.9, 181)
    xe, ye = square_boundary(phi_e)
    d = np.hypot(np.diff(xe), np.diff(ye))
    assert np.max(np.abs(d - (phi_e[1] - phi_e[0]))) < 1e-12
    # corners at even arcs, edge midpoints at odd arcs
    cx, cy = square_boundary(np.array([0.0, 2.0, 4.0, 6.0]))
    assert list(zip(cx, cy)) == [(1.0, -1.0), (1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0)]
    mx, my = square_boundary(np.array([1.0, 3.0, 5.0, 7.0]))
    assert list(zip(mx, my)) == [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]


def test_arc_of_inverts_square_boundary():
    phi = np.linspace(0.0, 8.0, 997, endpoint=False)
    x, y = square_boundary(phi)
    back = np.array([arc_of((x[i], y[i])) for i in range(len(phi))])
    assert np.max(np.abs(back - phi)) < 1e-12
    # scale invariance and the zero-vector error
    assert arc_of((10.0, 10.0)) == arc_of((0.5, 0.5)) == 2.0
    with pytest.raises(ValueError):
        arc_of((0.0, 0.0))


def test_polar_points_have_prescribed_sup_norm():
    rho = np.linspace(0.5, 3.0, 41)
    phi = np.linspace(0.0, 8.0, 41, endpoint=False)
    pts = polar_points(rho, phi)
    sup = np.maximum(np.abs(pts[:, 0]), np.abs(pts[:, 1]))
    assert np.max(np.abs(sup - rho)) < 1e-14


def test_polar_area_element():
    # integral of rho over the annulus = 4 (R^2 - r^2), exact for GL panels
    val, err = integrate_polar(lambda rho, phi: rho, 0.5, 2.0, tol=1e-10)
    assert val == pytest.approx(4.0 * (4.0 - 0.25), abs=1e-10)
    assert err < 1e-10


def test_polar_gaussian_matches_closed_form():
    def F(rho, phi):
        pts = polar_points(rho, phi)
        return np.exp(-pts[:, 0] ** 2 - pts[:, 1] ** 2) * rho

    val, _ = integrate_polar(F, 0.5, 2.5, tol=1e-10)
    square = lambda a: math.pi * erf(a) ** 2  # over [-a, a]^2
    assert val == pytest.approx(square(2.5) - square(0.5), abs=1e-9)


def test_polar_degenerate_interval():
    assert integrate_polar(lambda r, p: r, 2.0, 2.0) == (0.0, 0.0)
    assert integrate_polar(lambda r, p: r, 3.0, 2.0) == (0.0, 0.0)


def test_polar_rho_break_alignment():
    # indicator of rho <= 1 integrates exactly once the edge is a break
    def F(rho, phi):
        return np.where(rho <= 1.0, rho, 0.0)

    val, _ = integrate_polar(F, 0.5, 2.0, tol=1e-9, rho_breaks=(1.0,))
    assert val == pytest.approx(4.0 * (1.0 - 0.25), abs=1e-9)


def test_polar_budget_exhaustion_raises():
    # a discontinuity off the panel grid cannot reach a 1e-12 tolerance
    def F(rho, phi):
        return np.where(rho <= 1.234567, 1.0, 0.0)

    with pytest.raises(QuadratureError) as info:
        integrate_polar(F, 0.5, 2.0, tol=1e-12, max_depth=6)
    best = info.value.best_estimate
    assert abs(best - 8.0 * (1.234567 - 0.5)) < 0.1
    assert info.value.error_estimate > 1e-12


def test_rect_polynomial_and_breaks():
    val, _ = integrate_rect(lambda x, y: x * y * y, 0.0, 1.0, 0.0, 2.0, tol=1e-12)
    assert val == pytest.approx(4.0 / 3.0, abs=1e-12)

    def step(x, y):
        return np.where(x < 0.5, 1.0, 0.0)

    val, _ = integrate_rect(step, 0.0, 1.0, 0.0, 1.0, tol=1e-12, x_breaks=(0.5,))
    assert val == pytest.approx(0.5, abs=1e-12)


def test_rect_degenerate_interval():
    assert integrate_rect(lambda x, y: x, 1.0, 1.0, 0.0, 1.0) == (0.0, 0.0)
