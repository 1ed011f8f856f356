"""Test functions, the density integral and its supporting estimates.

The limiting object behind every orbit experiment is

    I(f, u) = integral over the punctured plane of f(v) / (v * u) dv,

where * is the star product of ``linalg``.  This module provides the
test-function bank (indicators, a smooth bump, a radial hat), their
support metadata (r_u, R_u, D0, D, B), the Holder norm machinery, the
radial partition of unity that slices f into star-product shells, and
the lift of f to the group used by the boundary-effect checks.

Vector norms written |.| are sup-norms throughout; the matrix-norm
kind only enters through the star product and through D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .lattice import LatticeSpec, ball
from .linalg import Mat2, MatrixNorm, as_vec, cocycle, mat_norm, section, shear
from .quadrature import (
    QuadratureError,
    arc_of,
    integrate_polar,
    integrate_rect,
    polar_points,
    square_boundary,
)

# Exponent delta0 of the error term; an input parameter of every bound
# that uses B, defaulting to the nonuniform-lattice value.
DELTA0_DEFAULT = 1.0 / 48.0


def _bump_profile(s: np.ndarray) -> np.ndarray:
    """exp(1 - 1/(1 - s^2)) on |s| < 1, zero outside, value 1 at 0."""
    s = np.asarray(s, dtype=np.float64)
    out = np.zeros_like(s)
    m = np.abs(s) < 1.0
    out[m] = np.exp(1.0 - 1.0 / (1.0 - s[m] ** 2))
    return out


def _bump_profile_gmax() -> float:
    # max of |d/ds exp(1 - 1/(1-s^2))| = 2s/(1-s^2)^2 * profile, ~ 2.1716
    s = np.linspace(0.0, 0.999, 200_001)
    g = _bump_profile(s)
    return float(np.max(2.0 * s / (1.0 - s**2) ** 2 * g))


_BUMP_GMAX = _bump_profile_gmax()


def sup_norms(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    return np.maximum(np.abs(points[:, 0]), np.abs(points[:, 1]))


def star_array(points: np.ndarray, u, kind: MatrixNorm) -> np.ndarray:
    """Star product of each row with u, vectorized."""
    u = as_vec(u)
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if kind == MatrixNorm.MAX_ENTRY:
        return sup_norms(points) * max(abs(float(u.x)), abs(float(u.y)))
    # Frobenius and operator-2 agree on rank-one matrices.
    l2 = np.hypot(points[:, 0], points[:, 1])
    return l2 * math.hypot(float(u.x), float(u.y))


class TestFunction:
    """Compactly supported weight on the plane, vanishing near 0.

    Subclasses fill in kind, support radii r_f <= R_f (sup-norm, exact
    types preserved when parameters are exact), theta, an amplitude,
    and the vectorized ``evaluate``.  ``formal_theta`` marks kinds
    (indicators) whose Holder norm is infinite: experiments admit
    them, theorem-grade bounds do not.
    """

    kind = "abstract"
    formal_theta = False

    def __init__(self, r_f, R_f, theta: float = 1.0, amplitude=1.0):
        if not (0 < float(r_f) <= float(R_f)):
            raise ValueError("support must satisfy 0 < r_f <= R_f")
        if not 0 < theta <= 1:
            raise ValueError("theta must lie in (0, 1]")
        self.r_f = r_f
        self.R_f = R_f
        self.theta = float(theta)
        self.amplitude = amplitude

    # -- support geometry -------------------------------------------------
    def growth(self):
        """v(f) = R_f / r_f >= 1."""
        return self.R_f / self.r_f

    def rho_breaks(self) -> tuple:
        """Radii where the radial profile kinks (quadrature hints)."""
        return ()

    def phi_breaks(self) -> tuple:
        """Arc positions (0..8) where the angular profile kinks."""
        return ()

    def support_boundary(self, n: int = 2048) -> np.ndarray:
        """Sample of the support boundary; default: the two extreme
        sup-norm spheres, correct for radially defined kinds."""
        phi = np.linspace(0.0, 8.0, n, endpoint=False)
        inner = polar_points(np.full_like(phi, float(self.r_f)), phi)
        outer = polar_points(np.full_like(phi, float(self.R_f)), phi)
        return np.vstack([inner, outer])

    # -- evaluation --------------------------------------------------------
    def evaluate(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, v) -> float:
        v = as_vec(v)
        return float(self.evaluate(np.array([[float(v.x), float(v.y)]]))[0])

    # -- transforms ----------------------------------------------------
    def rescale(self, lam):
        """The function v -> f(lam * v); support shrinks by lam."""
        raise NotImplementedError

    def scaled(self, c):
        """The function c * f."""
        raise NotImplementedError

    # -- Holder data -------------------------------------------------------
    def lipschitz_bound(self) -> float:
        """Upper bound on the sup-norm Lipschitz constant; inf if none."""
        return math.inf

    def holder_norm_bound(self) -> float:
        """Analytic upper bound for the three-term Holder norm."""
        if self.formal_theta:
            return math.inf
        amp = abs(float(self.amplitude))
        sup_term = amp
        l2_term = self._l2_weighted_bound()
        sem_term = 2.0 * float(self.R_f) * self.lipschitz_bound()
        return sup_term + l2_term + sem_term

    def _l2_weighted_bound(self) -> float:
        # |f| <= amp on the support annulus: integral f^2/|v|^2 over
        # r <= |v| <= R is at most amp^2 * 8 log(R/r).
        amp = abs(float(self.amplitude))
        return amp * math.sqrt(8.0 * math.log(float(self.R_f) / float(self.r_f)) + 1e-300)

    def config(self) -> dict:
        raise NotImplementedError


class AnnulusIndicator(TestFunction):
    """amplitude on {r <= |v|_inf <= R}, zero elsewhere."""

    kind = "annulus"
    formal_theta = True

    def __init__(self, r, R, theta: float = 1.0, amplitude=1.0):
        super().__init__(r, R, theta, amplitude)

    def evaluate(self, points):
        s = sup_norms(points)
        return float(self.amplitude) * (
            (s >= float(self.r_f)) & (s <= float(self.R_f))
        ).astype(np.float64)

    def rescale(self, lam):
        return AnnulusIndicator(self.r_f / lam, self.R_f / lam, self.theta, self.amplitude)

    def scaled(self, c):
        return AnnulusIndicator(self.r_f, self.R_f, self.theta, self.amplitude * c)

    def config(self):
        return {
            "kind": self.kind,
            "r": float(self.r_f),
            "R": float(self.R_f),
            "theta": self.theta,
            "amplitude": float(self.amplitude),
        }


class BoxIndicator(TestFunction):
    """amplitude on [x0, x1] x [y0, y1]; the box must avoid the origin."""

    kind = "box"
    formal_theta = True

    def __init__(self, x0, x1, y0, y1, theta: float = 1.0, amplitude=1.0):
        if not (x0 < x1 and y0 < y1):
            raise ValueError("degenerate box")
        mx = 0 if x0 <= 0 <= x1 else min(abs(x0), abs(x1))
        my = 0 if y0 <= 0 <= y1 else min(abs(y0), abs(y1))
        r_f = max(mx, my)
        if r_f == 0:
            raise ValueError("box contains the origin")
        R_f = max(abs(x0), abs(x1), abs(y0), abs(y1))
        super().__init__(r_f, R_f, theta, amplitude)
        self.bounds = (x0, x1, y0, y1)

    def evaluate(self, points):
        points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        x0, x1, y0, y1 = (float(b) for b in self.bounds)
        inside = (
            (points[:, 0] >= x0)
            & (points[:, 0] <= x1)
            & (points[:, 1] >= y0)
            & (points[:, 1] <= y1)
        )
        return float(self.amplitude) * inside.astype(np.float64)

    def rho_breaks(self):
        x0, x1, y0, y1 = (float(b) for b in self.bounds)
        radii = {max(abs(cx), abs(cy)) for cx in (x0, x1) for cy in (y0, y1)}
        return tuple(sorted(r for r in radii if float(self.r_f) < r < float(self.R_f)))

    def phi_breaks(self):
        x0, x1, y0, y1 = (float(b) for b in self.bounds)
        arcs = {arc_of((cx, cy)) for cx in (x0, x1) for cy in (y0, y1)}
        return tuple(sorted(arcs))

    def support_boundary(self, n: int = 2048):
        x0, x1, y0, y1 = (float(b) for b in self.bounds)
        per_side = max(2, n // 4)
        ts = np.linspace(0.0, 1.0, per_side)
        sides = [
            np.column_stack([x0 + (x1 - x0) * ts, np.full_like(ts, y0)]),
            np.column_stack([x0 + (x1 - x0) * ts, np.full_like(ts, y1)]),
            np.column_stack([np.full_like(ts, x0), y0 + (y1 - y0) * ts]),
            np.column_stack([np.full_like(ts, x1), y0 + (y1 - y0) * ts]),
        ]
        return np.vstack(sides)

    def rescale(self, lam):
        x0, x1, y0, y1 = self.bounds
        return BoxIndicator(x0 / lam, x1 / lam, y0 / lam, y1 / lam, self.theta, self.amplitude)

    def scaled(self, c):
        x0, x1, y0, y1 = self.bounds
        return BoxIndicator(x0, x1, y0, y1, self.theta, self.amplitude * c)

    def config(self):
        x0, x1, y0, y1 = (float(b) for b in self.bounds)
        return {
            "kind": self.kind,
            "x0": x0,
            "x1": x1,
            "y0": y0,
            "y1": y1,
            "theta": self.theta,
            "amplitude": float(self.amplitude),
        }


class SmoothBump(TestFunction):
    """C-infinity bump on a Euclidean disk that avoids the origin."""

    kind = "bump"

    def __init__(self, center, radius, theta: float = 1.0, amplitude=1.0):
        cx, cy = (float(c) for c in center)
        radius = float(radius)
        if radius <= 0:
            raise ValueError("radius must be positive")
        if math.hypot(cx, cy) <= radius:
            raise ValueError("bump support touches the origin")
        # Extreme sup-norms over the disk live on its boundary circle.
        ang = np.linspace(0.0, 2.0 * math.pi, 4096, endpoint=False)
        s = np.maximum(np.abs(cx + radius * np.cos(ang)), np.abs(cy + radius * np.sin(ang)))
        super().__init__(float(np.min(s)), float(np.max(s)), theta, amplitude)
        self.center = (cx, cy)
        self.radius = radius

    def evaluate(self, points):
        points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        d = np.hypot(points[:, 0] - self.center[0], points[:, 1] - self.center[1])
        return float(self.amplitude) * _bump_profile(d / self.radius)

    def support_boundary(self, n: int = 2048):
        ang = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        return np.column_stack(
            [
                self.center[0] + self.radius * np.cos(ang),
                self.center[1] + self.radius * np.sin(ang),
            ]
        )

    def rescale(self, lam):
        lam = float(lam)
        return SmoothBump(
            (self.center[0] / lam, self.center[1] / lam),
            self.radius / lam,
            self.theta,
            self.amplitude,
        )

    def scaled(self, c):
        return SmoothBump(self.center, self.radius, self.theta, self.amplitude * c)

    def lipschitz_bound(self):
        return abs(float(self.amplitude)) * _BUMP_GMAX / self.radius

    def _l2_weighted_bound(self):
        amp = abs(float(self.amplitude))
        return amp * self.radius * math.sqrt(math.pi) / float(self.r_f)

    def config(self):
        return {
            "kind": self.kind,
            "center": [self.center[0], self.center[1]],
            "radius": self.radius,
            "theta": self.theta,
            "amplitude": float(self.amplitude),
        }


class RadialBump(TestFunction):
    """Smooth bump in the sup-norm radius: profile((|v| - mid)/half).

    C-infinity in the radius and Lipschitz on the plane (the sup-norm
    radius is 1-Lipschitz), so it is theorem-grade at theta = 1 while
    still spreading its mass over all directions like the indicators.
    """

    kind = "rbump"

    def __init__(self, mid, half, theta: float = 1.0, amplitude=1.0):
        if not 0 < half < mid:
            raise ValueError("need 0 < half < mid so the support avoids 0")
        super().__init__(mid - half, mid + half, theta, amplitude)
        self.mid = mid
        self.half = half

    def evaluate(self, points):
        s = (sup_norms(points) - float(self.mid)) / float(self.half)
        return float(self.amplitude) * _bump_profile(s)

    def rescale(self, lam):
        return RadialBump(self.mid / lam, self.half / lam, self.theta, self.amplitude)

    def scaled(self, c):
        return RadialBump(self.mid, self.half, self.theta, self.amplitude * c)

    def lipschitz_bound(self):
        return abs(float(self.amplitude)) * _BUMP_GMAX / float(self.half)

    def config(self):
        return {
            "kind": self.kind,
            "mid": float(self.mid),
            "half": float(self.half),
            "theta": self.theta,
            "amplitude": float(self.amplitude),
        }


class RadialHat(TestFunction):
    """Tent in the sup-norm radius: 1 - ||v| - mid| / half, clipped."""

    kind = "hat"

    def __init__(self, mid, half, theta: float = 1.0, amplitude=1.0):
        if not 0 < half < mid:
            raise ValueError("need 0 < half < mid so the support avoids 0")
        super().__init__(mid - half, mid + half, theta, amplitude)
        self.mid = mid
        self.half = half

    def evaluate(self, points):
        s = sup_norms(points)
        vals = 1.0 - np.abs(s - float(self.mid)) / float(self.half)
        return float(self.amplitude) * np.maximum(vals, 0.0)

    def rho_breaks(self):
        return (float(self.mid),)

    def rescale(self, lam):
        return RadialHat(self.mid / lam, self.half / lam, self.theta, self.amplitude)

    def scaled(self, c):
        return RadialHat(self.mid, self.half, self.theta, self.amplitude * c)

    def lipschitz_bound(self):
        return abs(float(self.amplitude)) / float(self.half)

    def config(self):
        return {
            "kind": self.kind,
            "mid": float(self.mid),
            "half": float(self.half),
            "theta": self.theta,
            "amplitude": float(self.amplitude),
        }


def function_from_config(cfg: dict) -> TestFunction:
    kind = cfg.get("kind")
    theta = cfg.get("theta", 1.0)
    amp = cfg.get("amplitude", 1.0)
    if kind == "annulus":
        return AnnulusIndicator(cfg["r"], cfg["R"], theta, amp)
    if kind == "box":
        return BoxIndicator(cfg["x0"], cfg["x1"], cfg["y0"], cfg["y1"], theta, amp)
    if kind == "bump":
        return SmoothBump(tuple(cfg["center"]), cfg["radius"], theta, amp)
    if kind == "hat":
        return RadialHat(cfg["mid"], cfg["half"], theta, amp)
    if kind == "rbump":
        return RadialBump(cfg["mid"], cfg["half"], theta, amp)
    raise ValueError(f"unknown test-function kind {kind!r}")


# ---------------------------------------------------------------------------
# support metadata


@dataclass(frozen=True)
class SupportMeta:
    """Star-product support data of (f, u) plus the derived constants."""

    r_u: float
    R_u: float
    v_u: float
    D0: object
    D: float
    B: float


def _section_distortion(points: np.ndarray, u, kind: MatrixNorm) -> float:
    """max over sample points x of ||section(x) section(u)^{-1}||."""
    u = as_vec(u)
    su_inv = section(Vec2f(u)).inverse()
    best = 0.0
    for x, y in np.asarray(points, dtype=np.float64).reshape(-1, 2):
        m = section((float(x), float(y))) @ su_inv
        best = max(best, mat_norm(m, kind))
    return best


def Vec2f(u):
    u = as_vec(u)
    return (float(u.x), float(u.y))


def compute_support_meta(
    f: TestFunction,
    u,
    kind: MatrixNorm = MatrixNorm.MAX_ENTRY,
    delta0: float = DELTA0_DEFAULT,
    n_boundary: int = 2048,
) -> SupportMeta:
    """Support radii of f against u, and the constants D0, D, B.

    r_u/R_u are the extreme star products over supp f: exact products
    for the max-entry norm, support-boundary extrema otherwise (the
    star product is radially monotone, so boundaries suffice).  D0 is
    returned in the arithmetic of its inputs (Fractions stay exact).
    """
    u = as_vec(u)
    su = max(abs(u.x), abs(u.y))
    if float(su) == 0.0:
        raise ValueError("need |u| > 0")
    if kind == MatrixNorm.MAX_ENTRY:
        r_u, R_u = float(f.r_f * su), float(f.R_f * su)
    else:
        stars = star_array(f.support_boundary(n_boundary), u, kind)
        r_u, R_u = float(np.min(stars)), float(np.max(stars))
    D0 = max(f.R_f / su, su / f.r_f)
    D = _section_distortion(f.support_boundary(n_boundary), u, kind)
    vf = float(f.R_f) / float(f.r_f)
    B = (float(f.R_f) / float(su)) ** (-f.theta * delta0) * (math.log(vf) + 1.0)
    return SupportMeta(r_u=r_u, R_u=R_u, v_u=R_u / r_u, D0=D0, D=D, B=B)


# ---------------------------------------------------------------------------
# density integral


def density_integral_detailed(
    f: TestFunction, u, tol: float = 1e-6, kind: MatrixNorm = MatrixNorm.MAX_ENTRY
) -> tuple[float, float]:
    u = as_vec(u)
    if max(abs(float(u.x)), abs(float(u.y))) == 0.0:
        raise ValueError("need |u| > 0")

    if f.kind == "box":
        # on its own rectangle the integrand is smooth except for the
        # sup-norm kinks; cartesian panels converge much faster than
        # polar panels cut by the box edges
        x0, x1, y0, y1 = (float(b) for b in f.bounds)

        def G(xs, ys):
            pts = np.column_stack([xs, ys])
            return f.evaluate(pts) / star_array(pts, u, kind)

        axis_breaks = (0.0,)
        return integrate_rect(
            G, x0, x1, y0, y1, tol=tol, x_breaks=axis_breaks, y_breaks=axis_breaks
        )

    def F(rho, phi):
        pts = polar_points(rho, phi)
        vals = f.evaluate(pts)
        return vals * rho / star_array(pts, u, kind)

    phi_edges = sorted({0.0, 2.0, 4.0, 6.0, 8.0, *f.phi_breaks()})
    return integrate_polar(
        F, float(f.r_f), float(f.R_f), tol=tol,
        rho_breaks=f.rho_breaks(), phi_breaks=phi_edges,
    )


def density_integral(
    f: TestFunction, u, tol: float = 1e-6, kind: MatrixNorm = MatrixNorm.MAX_ENTRY
) -> float:
    """integral of f(v)/(v * u) dv, adaptive to absolute error ~ tol.

    Raises QuadratureError (carrying the best estimate) if the panel
    budget cannot reach tol.
    """
    return density_integral_detailed(f, u, tol, kind)[0]


def plain_integral(evaluate, r_lo: float, r_hi: float, tol: float = 1e-7, rho_breaks=()) -> float:
    """integral of a plane function given by a vectorized evaluate."""

    def F(rho, phi):
        return evaluate(polar_points(rho, phi)) * rho

    return integrate_polar(F, r_lo, r_hi, tol=tol, rho_breaks=rho_breaks)[0]


# ---------------------------------------------------------------------------
# Holder norm estimate


@dataclass(frozen=True)
class HolderEstimate:
    sup_term: float
    l2_term: float
    seminorm_term: float
    theta: float

    @property
    def total(self) -> float:
        return self.sup_term + self.l2_term + self.seminorm_term


def holder_norm_estimate(
    f: TestFunction, samples: int = 20000, seed: int = 0, theta: float | None = None
) -> HolderEstimate:
    """Lower estimate of the three-term Holder norm.

    sup and weighted-L2 terms come from deterministic grids; the
    relative seminorm sup_{0<|x-y|<=|x|/2} |x|^t |f(x)-f(y)|/|x-y|^t
    mixes seeded random pairs with deterministic probes straddling the
    support boundary at separations shrinking like 1/samples^2, so for
    discontinuous f the estimate grows without bound in `samples`.
    """
    theta = f.theta if theta is None else float(theta)
    r, R = float(f.r_f), float(f.R_f)
    rng = np.random.default_rng(seed)

    side = max(8, int(math.sqrt(samples)))
    rho = np.linspace(r, R, side)
    phi = np.linspace(0.0, 8.0, side, endpoint=False)
    rr, pp = np.meshgrid(rho, phi, indexing="ij")
    grid_vals = f.evaluate(polar_points(rr.ravel(), pp.ravel()))
    sup_term = float(np.max(np.abs(grid_vals)))

    def F(rho_a, phi_a):
        vals = f.evaluate(polar_points(rho_a, phi_a))
        return vals * vals / rho_a

    l2_sq, _ = integrate_polar(F, r, R, tol=1e-9 * (1 + sup_term) ** 2, rho_breaks=f.rho_breaks())
    l2_term = math.sqrt(max(l2_sq, 0.0))

    def quotient(xs, ys):
        fx = f.evaluate(xs)
        fy = f.evaluate(ys)
        nx = sup_norms(xs)
        d = sup_norms(xs - ys)
        ok = (d > 0) & (d <= nx / 2.0)
        q = np.zeros_like(d)
        q[ok] = nx[ok] ** theta * np.abs(fx[ok] - fy[ok]) / d[ok] ** theta
        return float(np.max(q)) if q.size else 0.0

    n_pairs = max(64, samples)
    rho_x = rng.uniform(0.5 * r, 1.25 * R, n_pairs)
    phi_x = rng.uniform(0.0, 8.0, n_pairs)
    xs = polar_points(rho_x, phi_x)
    scale = np.exp(rng.uniform(math.log(1e-7), 0.0, n_pairs)) * (rho_x / 2.0)
    ang = rng.uniform(0.0, 2.0 * math.pi, n_pairs)
    ys = xs + np.column_stack([scale * np.cos(ang), scale * np.sin(ang)])
    sem = quotient(xs, ys)

    # Deterministic straddle probes across every radial break.
    deltas = np.geomspace(0.25 * r, max(r / samples**2, 1e-12), 24)
    for rho0 in {r, R, *map(float, f.rho_breaks())}:
        for phidir in (0.0, 1.0, 3.0, 5.0):
            base = np.full_like(deltas, phidir)
            xs = polar_points(rho0 + deltas, base)
            ys = polar_points(rho0 - deltas, base)
            sem = max(sem, quotient(xs, ys))
    return HolderEstimate(sup_term=sup_term, l2_term=l2_term, seminorm_term=sem, theta=theta)


# ---------------------------------------------------------------------------
# partition of unity in star-product shells


def tent(x):
    """kappa(x) = max(0, 1 - |x|); sum over integer shifts is 1 exactly."""
    ax = -x if x < 0 else x
    one = Fraction(1) if isinstance(x, Fraction) else 1.0
    return max(one - ax, one * 0)


class PartitionPiece:
    """f_l(w) = f(e^{-l/alpha} w) * kappa(alpha log((w * u)/|u|)).

    Nonzero only in the thin star shell e^{-1/alpha}|u| <= w * u
    <= e^{1/alpha}|u|; reconstruction: sum over l of f_l(e^{l/alpha} v)
    gives back f(v).
    """

    def __init__(self, ell: int, alpha: float, f: TestFunction, u, kind: MatrixNorm):
        self.ell = ell
        self.alpha = float(alpha)
        self.base = f
        self.u = as_vec(u)
        self.kind = kind
        self.scale = math.exp(-ell / self.alpha)
        su = max(abs(float(self.u.x)), abs(float(self.u.y)))
        self.r_l = math.exp((ell - 1) / self.alpha) * su
        self.R_l = math.exp((ell + 1) / self.alpha) * su
        self.u_scaled = self.u.scale(math.exp(ell / self.alpha))
        self._su = su

    def evaluate(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        stars = star_array(points, self.u, self.kind)
        out = np.zeros(points.shape[0])
        ok = stars > 0
        if not np.any(ok):
            return out
        x = self.alpha * np.log(stars[ok] / self._su)
        kap = np.maximum(1.0 - np.abs(x), 0.0)
        live = kap > 0
        if np.any(live):
            idx = np.flatnonzero(ok)[live]
            out[idx] = self.base.evaluate(points[idx] * self.scale) * kap[live]
        return out

    def __call__(self, v) -> float:
        v = as_vec(v)
        return float(self.evaluate(np.array([[float(v.x), float(v.y)]]))[0])

    def support_rho_range(self) -> tuple[float, float]:
        lo = float(self.base.r_f) / self.scale
        hi = float(self.base.R_f) / self.scale
        return lo, hi

    def integral(self, tol: float = 1e-7) -> float:
        lo, hi = self.support_rho_range()
        breaks = [b / self.scale for b in self.base.rho_breaks()]
        if self.kind == MatrixNorm.MAX_ENTRY:
            # kappa kinks where w*u = e^{j/alpha}|u|, circles in rho.
            breaks.extend(math.exp(j / self.alpha) for j in (-1, 0, 1))
        return plain_integral(self.evaluate, lo, hi, tol=tol, rho_breaks=breaks)


def build_partition(
    f: TestFunction, u, alpha: float = 4.0, kind: MatrixNorm = MatrixNorm.MAX_ENTRY
) -> list[PartitionPiece]:
    """All potentially nonzero pieces f_l.

    The candidate range comes from supp f_l != {} requiring
    e^{l/alpha} [r_u, R_u] to meet the thin shell around |u|: l lies in
    the open interval (-1 - U, 1 - L) with L = alpha log(r_u/|u|),
    U = alpha log(R_u/|u|), so the count is at most alpha log v_u + 2.
    """
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    meta = compute_support_meta(f, u, kind)
    u = as_vec(u)
    su = max(abs(float(u.x)), abs(float(u.y)))
    L = alpha * math.log(meta.r_u / su)
    U = alpha * math.log(meta.R_u / su)
    lo = math.floor(-1.0 - U) + 1
    hi = math.ceil(1.0 - L) - 1
    return [PartitionPiece(ell, alpha, f, u, kind) for ell in range(lo, hi + 1)]


def partition_reconstruction_residual(
    pieces: list[PartitionPiece], f: TestFunction, points: np.ndarray
) -> float:
    """max |sum_l f_l(e^{l/alpha} v) - f(v)| over the sample points."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    acc = np.zeros(points.shape[0])
    for piece in pieces:
        acc += piece.evaluate(points / piece.scale)
    return float(np.max(np.abs(acc - f.evaluate(points))))


# ---------------------------------------------------------------------------
# lifts to the group


@lru_cache(maxsize=1)
def _bump_mass() -> float:
    val, _ = quad(lambda x: math.exp(-1.0 / (1.0 - x * x)), -1.0, 1.0, epsabs=1e-14, limit=200)
    return val


class Bump1D:
    """Normalized C-infinity bump on (-1, 1) with unit integral.

    `mass_scale` deliberately breaks the normalization; the self-test
    harness uses it to prove the lift identities are actually checked.
    """

    def __init__(self, mass_scale: float = 1.0):
        self.mass_scale = float(mass_scale)
        self._norm = self.mass_scale / _bump_mass()

    def __call__(self, x: float) -> float:
        x = float(x)
        if abs(x) >= 1.0:
            return 0.0
        return math.exp(-1.0 / (1.0 - x * x)) * self._norm


DEFAULT_BUMP = Bump1D()

_U0 = (1.0, 0.0)


def lift_eval(f: TestFunction, g: Mat2, bump: Bump1D = DEFAULT_BUMP) -> float:
    """f-tilde(g) = f(g u0) * bump(shear coordinate of g over g u0)."""
    v = g.apply(_U0)
    fv = f(v)
    if fv == 0.0:
        return 0.0
    return fv * bump(cocycle(_U0, g))


def bar_lift_eval(
    f: TestFunction,
    g: Mat2,
    spec: LatticeSpec,
    bump: Bump1D = DEFAULT_BUMP,
    safety: float = 1.25,
) -> float:
    """Sum of f-tilde over the lattice orbit of g (a point of Gamma\\G).

    Only finitely many gamma contribute: on supp f-tilde the norm of
    gamma*g is at most R_u0 + D, so ||gamma|| is bounded via
    submultiplicativity (constant 2 for max-entry, 1 otherwise).
    Evaluated by exact ball enumeration; meant for moderate bounds.
    """
    meta = compute_support_meta(f, _U0, spec.norm)
    h_bound = meta.R_u + meta.D
    c_sub = 2.0 if spec.norm == MatrixNorm.MAX_ENTRY else 1.0
    T_gamma = c_sub * h_bound * mat_norm(g.inverse(), spec.norm) * safety
    terms = []
    for gamma in ball(spec, T_gamma):
        val = lift_eval(f, gamma.matrix() @ g, bump)
        if val:
            terms.append(val)
    return math.fsum(terms)


def boundary_lemma_check(
    f: TestFunction,
    u,
    gamma,
    T: float,
    kind: MatrixNorm = MatrixNorm.MAX_ENTRY,
    bump: Bump1D = DEFAULT_BUMP,
    r_param: float | None = None,
) -> dict:
    """Window bookkeeping for integrating the lift along the shear flow.

    With W = 1 + (T + D)/r (r <= r_u), s -> f-tilde(gamma section(u) h_s)
    integrates over [-W, W] to exactly f(gamma u) whenever
    ||gamma|| <= T, because tau(gamma section(u) h_s) = gamma u for all
    s and the shear coordinate shifts by s.  When ||gamma|| >= T the
    same integrand vanishes identically on the shrunken window
    [-W2, W2], W2 = (T - D)/R_u - 1.
    """
    gm = gamma.matrix() if hasattr(gamma, "matrix") else gamma
    meta = compute_support_meta(f, u, kind)
    r = meta.r_u if r_param is None else float(r_param)
    if r > meta.r_u * (1 + 1e-12):
        raise ValueError("window radius r must satisfy r <= r_u")
    su = section(Vec2f(u))
    base = gm @ su

    def integrand(s: float) -> float:
        return lift_eval(f, base @ shear(s), bump)

    gu = gm.apply(u)
    f_val = f(gu)
    gnorm = mat_norm(gm, kind)
    W = 1.0 + (T + meta.D) / r
    c0 = cocycle(Vec2f(u), gm) if max(abs(gu.x), abs(gu.y)) > 0 else 0.0
    pts = sorted(p for p in (-1.0 - c0, 1.0 - c0, -c0) if -W < p < W)
    captured, cap_err = quad(integrand, -W, W, points=pts or None, limit=300, epsabs=1e-11)
    W2 = (T - meta.D) / meta.R_u - 1.0
    if W2 > 0:
        shrunk, _ = quad(integrand, -W2, W2, points=[p for p in pts if -W2 < p < W2] or None,
                         limit=300, epsabs=1e-12)
    else:
        shrunk = 0.0
    return {
        "gamma_norm": gnorm,
        "T": float(T),
        "window": W,
        "captured": captured,
        "quad_error": cap_err,
        "f_value": f_val,
        "residual": abs(captured - f_val),
        "shrunk_window": max(W2, 0.0),
        "shrunk_integral": shrunk,
        "capture_applies": bool(gnorm <= T),
        "vanish_applies": bool(gnorm >= T),
    }
