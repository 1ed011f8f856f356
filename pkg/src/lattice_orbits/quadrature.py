"""Adaptive tensor quadrature in sup-norm polar coordinates.

Plane integrals here are taken over annuli r <= |v|_inf <= R.  Writing
v = rho * sigma(phi), where sigma parametrizes the unit sup-norm
sphere (the boundary of the square [-1,1]^2) by arc length
phi in [0, 8), the area element is exactly rho drho dphi.  Initial
panels are aligned with the four corners of the square and any radii
where the integrand kinks, so smooth-by-parts integrands converge at
Gauss-Legendre speed; genuinely discontinuous integrands (indicator
test functions) fall back to adaptive bisection.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

PERIMETER = 8.0


class QuadratureError(Exception):
    """Tolerance not reached; carries the best available estimate."""

    def __init__(self, message: str, best_estimate: float, error_estimate: float):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


def square_boundary(phi):
    """Point on the unit sup-norm sphere at arc length phi (mod 8).

    Starts at the corner (1, -1) and walks counterclockwise at unit
    speed; vectorized over numpy arrays.
    """
    phi = np.mod(np.asarray(phi, dtype=np.float64), PERIMETER)
    x = np.empty_like(phi)
    y = np.empty_like(phi)
    m = phi < 2.0
    x[m], y[m] = 1.0, phi[m] - 1.0
    m = (phi >= 2.0) & (phi < 4.0)
    x[m], y[m] = 3.0 - phi[m], 1.0
    m = (phi >= 4.0) & (phi < 6.0)
    x[m], y[m] = -1.0, 5.0 - phi[m]
    m = phi >= 6.0
    x[m], y[m] = phi[m] - 7.0, -1.0
    return x, y


def polar_points(rho, phi) -> np.ndarray:
    """(n, 2) array of v = rho * sigma(phi)."""
    sx, sy = square_boundary(phi)
    rho = np.asarray(rho, dtype=np.float64)
    return np.column_stack([rho * sx, rho * sy])


def arc_of(w) -> float:
    """Arc position in [0, 8) of the direction of w (inverse of
    square_boundary); w must be nonzero."""
    x, y = float(w[0]), float(w[1])
    s = max(abs(x), abs(y))
    if s == 0.0:
        raise ValueError("zero vector has no direction")
    x, y = x / s, y / s
    if x == 1.0:
        return (1.0 + y) % 8.0
    if y == 1.0:
        return 3.0 - x
    if x == -1.0:
        return 5.0 - y
    return (7.0 + x) % 8.0


@lru_cache(maxsize=8)
def _gl_nodes(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel_value(F, r0, r1, p0, p1, order) -> float:
    x, w = _gl_nodes(order)
    rm, rh = 0.5 * (r0 + r1), 0.5 * (r1 - r0)
    pm, ph = 0.5 * (p0 + p1), 0.5 * (p1 - p0)
    rho = rm + rh * x
    phi = pm + ph * x
    rr, pp = np.meshgrid(rho, phi, indexing="ij")
    vals = F(rr.ravel(), pp.ravel()).reshape(order, order)
    return float(rh * ph * (w[:, None] * w[None, :] * vals).sum())


def _adaptive_panels(F, panels, total_area, tol, order, max_depth):
    """Shared stack-based refinement over rectangular panels.

    Each panel gets a tolerance share proportional to its area; a
    panel is accepted when the 4-child refinement moves its value by
    less than that share.  Returns (value, error_estimate) or raises
    QuadratureError carrying the best estimate.
    """
    stack = [(s0, s1, t0, t1, 0) for s0, s1, t0, t1 in panels]
    value = 0.0
    err_total = 0.0
    failed = False
    while stack:
        r0, r1, p0, p1, depth = stack.pop()
        coarse = _panel_value(F, r0, r1, p0, p1, order)
        rm, pm = 0.5 * (r0 + r1), 0.5 * (p0 + p1)
        fine = (
            _panel_value(F, r0, rm, p0, pm, order)
            + _panel_value(F, r0, rm, pm, p1, order)
            + _panel_value(F, rm, r1, p0, pm, order)
            + _panel_value(F, rm, r1, pm, p1, order)
        )
        err = abs(fine - coarse)
        share = tol * ((r1 - r0) * (p1 - p0)) / total_area
        if err <= max(share, 1e-15 * (1.0 + abs(fine))):
            value += fine
            err_total += err
        elif depth >= max_depth:
            value += fine
            err_total += err
            failed = True
        else:
            stack.append((r0, rm, p0, pm, depth + 1))
            stack.append((r0, rm, pm, p1, depth + 1))
            stack.append((rm, r1, p0, pm, depth + 1))
            stack.append((rm, r1, pm, p1, depth + 1))
    if failed and err_total > tol:
        raise QuadratureError(
            f"tolerance {tol} not reached (estimate {err_total:.3g})", value, err_total
        )
    return value, err_total


def _grid_panels(s_edges, t_edges):
    return [
        (s_edges[i], s_edges[i + 1], t_edges[j], t_edges[j + 1])
        for i in range(len(s_edges) - 1)
        for j in range(len(t_edges) - 1)
    ]


def integrate_polar(
    F,
    rho_lo: float,
    rho_hi: float,
    tol: float = 1e-6,
    rho_breaks=(),
    phi_breaks=(0.0, 2.0, 4.0, 6.0, 8.0),
    order: int = 7,
    max_depth: int = 14,
) -> tuple[float, float]:
    """Integrate F(rho, phi) over [rho_lo, rho_hi] x [0, 8).

    F gets flat float64 arrays and returns matching values; the caller
    folds the rho Jacobian into F.  Returns (value, error_estimate)
    with the estimate below tol, or raises QuadratureError carrying
    the best estimate when the panel budget is exhausted.
    """
    if rho_hi <= rho_lo:
        return 0.0, 0.0
    redges = sorted({rho_lo, rho_hi, *(b for b in rho_breaks if rho_lo < b < rho_hi)})
    pedges = sorted(set(float(p) for p in phi_breaks))
    total_area = (rho_hi - rho_lo) * (pedges[-1] - pedges[0])
    panels = _grid_panels(redges, pedges)
    return _adaptive_panels(F, panels, total_area, tol, order, max_depth)


def integrate_rect(
    F,
    x0: float,
    x1: float,
    y0: float,
    y1: float,
    tol: float = 1e-6,
    x_breaks=(),
    y_breaks=(),
    order: int = 7,
    max_depth: int = 14,
) -> tuple[float, float]:
    """Integrate F(x, y) over the rectangle [x0, x1] x [y0, y1].

    Same engine and contract as integrate_polar, in cartesian
    coordinates; suited to integrands that are smooth on a box.
    """
    if x1 <= x0 or y1 <= y0:
        return 0.0, 0.0
    xe = sorted({x0, x1, *(b for b in x_breaks if x0 < b < x1)})
    ye = sorted({y0, y1, *(b for b in y_breaks if y0 < b < y1)})
    total_area = (x1 - x0) * (y1 - y0)
    return _adaptive_panels(F, _grid_panels(xe, ye), total_area, tol, order, max_depth)
