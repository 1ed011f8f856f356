"""Orbit-sum experiments: convergence, scaling, targets, clouds.

The central statistic is the orbit sum

    S(T) = sum over gamma with ||gamma|| <= T of f(gamma u),

which for suitable (Gamma, f, u) grows like (2 T / mu) * I(f, u) with
I the density integral and mu the covolume of the lattice under the
measure normalization fixed by the plane.  Nothing here hardcodes mu:
convergence studies fit it as 2/slope and the scaling sweeps reuse it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import fastball
from .density import (
    TestFunction,
    compute_support_meta,
    density_integral,
    function_from_config,
)
from .diophantine import cf_expand, classify_slope, cusp_window_bound, slope_of
from .lattice import LatticeKind, LatticeSpec
from .linalg import Mat2, MatrixNorm, as_vec, norm_cocycle_gap


@dataclass
class ExperimentConfig:
    lattice: LatticeSpec
    u: tuple
    f: TestFunction
    T_grid: list
    alpha: float = 0.0
    seed: int = 0
    tol: float = 1e-6

    def __post_init__(self):
        grid = [float(t) for t in self.T_grid]
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("T_grid must be strictly increasing")
        if not grid:
            raise ValueError("T_grid must be nonempty")
        if not -1.0 < float(self.alpha) < 1.0:
            raise ValueError("alpha must lie in (-1, 1)")

    def as_dict(self) -> dict:
        return {
            "lattice": self.lattice.kind.value,
            "norm": self.lattice.norm.value,
            "u": [float(c) for c in self.u],
            "f": self.f.config(),
            "T_grid": [float(t) for t in self.T_grid],
            "alpha": float(self.alpha),
            "seed": int(self.seed),
            "tol": float(self.tol),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        spec = LatticeSpec(LatticeKind(d["lattice"]), MatrixNorm(d.get("norm", "max")))
        return cls(
            lattice=spec,
            u=tuple(d["u"]),
            f=function_from_config(d["f"]),
            T_grid=list(d["T_grid"]),
            alpha=d.get("alpha", 0.0),
            seed=d.get("seed", 0),
            tol=d.get("tol", 1e-6),
        )


def _floats(u) -> tuple[float, float]:
    v = as_vec(u)
    return float(v.x), float(v.y)


def _slope_warning(spec: LatticeSpec, u) -> dict | None:
    """Rational slopes give discrete SL(2,Z)-orbits; flag, don't stop."""
    if spec.kind != LatticeKind.SL2Z:
        return None
    try:
        z = slope_of(u)
    except (ValueError, ArithmeticError):
        return None
    if isinstance(z, (int, Fraction)):
        return {
            "kind": "discrete-orbit",
            "detail": "initial vector has rational slope; the orbit is discrete "
            "and the density limit does not apply",
            "slope": str(z),
        }
    return None


def orbit_sum(
    spec: LatticeSpec,
    T: float,
    f: TestFunction,
    u,
    debug: bool = False,
) -> float:
    """Sum of f over the norm-T ball orbit of u; deterministic order."""
    if T < 1:
        raise ValueError("need T >= 1")
    ux, uy = _floats(u)
    coeffs, points = fastball.orbit_hits(spec, T, (ux, uy), float(f.r_f), float(f.R_f))
    vals = f.evaluate(points)
    if debug and coeffs.shape[0]:
        meta = compute_support_meta(f, (ux, uy), spec.norm)
        live = np.flatnonzero(vals != 0.0)
        for i in live:
            g = Mat2(*spec_matrix(spec, coeffs[i]))
            gap = norm_cocycle_gap((ux, uy), g, spec.norm)
            if abs(gap) > 1.0001 * meta.D + 1e-7 * (1.0 + T):
                raise AssertionError(
                    f"norm-cocycle gap {gap!r} exceeds D={meta.D!r} for row {i}"
                )
    return math.fsum(vals[vals != 0.0].tolist())


def spec_matrix(spec: LatticeSpec, row) -> tuple:
    """Float matrix entries for one coefficient row of the given kind."""
    if spec.kind == LatticeKind.SL2Z:
        a, b, c, d = (float(v) for v in row[:4])
        return a, b, c, d
    x, y, z, t = (float(v) for v in row[:4])
    s2 = math.sqrt(2.0)
    return x + s2 * y, z + s2 * t, 3.0 * (z - s2 * t), x - s2 * y


@dataclass
class ConvergenceRow:
    T: float
    S: float
    I: float
    ratio: float
    err: float


@dataclass
class ConvergenceReport:
    config: dict
    rows: list
    I: float
    mu_hat: float
    slope: float
    error_exponent: float
    warnings: list = field(default_factory=list)

    def ratios(self) -> list:
        return [r.ratio for r in self.rows]

    def payload(self) -> dict:
        return {
            "config": self.config,
            "I": self.I,
            "mu_hat": self.mu_hat,
            "slope": self.slope,
            "error_exponent": self.error_exponent,
            "warnings": self.warnings,
            "rows": [
                {"T": r.T, "S": r.S, "I": r.I, "ratio": r.ratio, "err": r.err}
                for r in self.rows
            ],
        }


def _fit_exponent(Ts, errs) -> float:
    pts = [(math.log(t), math.log(e)) for t, e in zip(Ts, errs) if e > 0]
    if len(pts) < 2:
        return math.nan
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    return float(np.polyfit(xs, ys, 1)[0])


def convergence_study(
    spec: LatticeSpec,
    u,
    f: TestFunction,
    T_grid,
    tol: float = 1e-6,
    hits=None,
    debug: bool = False,
) -> ConvergenceReport:
    """Orbit sums along a T grid against the density-integral line.

    The covolume estimate mu_hat = 2/slope comes from the least-squares
    slope of S against T*I through the origin, so the err column is the
    distance to the fitted theorem line |S - slope*T*I|.
    """
    cfg = ExperimentConfig(spec, tuple(_floats(u)), f, list(T_grid), 0.0, 0, tol)
    warnings = []
    w = _slope_warning(spec, u)
    if w:
        warnings.append(w)
    ux, uy = _floats(u)
    I = density_integral(f, (ux, uy), tol, spec.norm)
    T_max = float(max(float(t) for t in T_grid))
    if hits is None:
        hits = fastball.orbit_hits(spec, T_max, (ux, uy), float(f.r_f), float(f.R_f))
    coeffs, points = hits
    vals = f.evaluate(points)
    rows = []
    for T in (float(t) for t in T_grid):
        if debug:
            orbit_sum(spec, T, f, (ux, uy), debug=True)
        mask = fastball.membership_mask(spec, coeffs, T)
        sel = vals[mask]
        S = math.fsum(sel[sel != 0.0].tolist())
        rows.append((T, S))
    xs = np.array([T * I for T, _ in rows])
    ss = np.array([S for _, S in rows])
    denom = float(np.dot(xs, xs))
    slope = float(np.dot(xs, ss) / denom) if denom > 0 else math.nan
    mu_hat = 2.0 / slope if slope and not math.isnan(slope) and slope != 0 else math.nan
    out = [
        ConvergenceRow(T=T, S=S, I=I, ratio=(S / (T * I) if T * I != 0 else math.nan),
                       err=abs(S - slope * T * I))
        for T, S in rows
    ]
    expo = _fit_exponent([r.T for r in out], [r.err for r in out])
    return ConvergenceReport(
        config=cfg.as_dict(), rows=out, I=I, mu_hat=mu_hat, slope=slope,
        error_exponent=expo, warnings=warnings,
    )


def constant_independence(reports: list) -> dict:
    """Spread of fitted constants across a bank of convergence runs."""
    mus = [r.mu_hat for r in reports]
    finals = [r.rows[-1].ratio for r in reports]
    def spread(vals):
        lo, hi = min(vals), max(vals)
        return math.inf if lo <= 0 else hi / lo - 1.0
    return {
        "mu_values": mus,
        "mu_spread": spread(mus),
        "final_ratios": finals,
        "ratio_spread": spread(finals),
    }


@dataclass
class ScalingRow:
    T: float
    W: float
    normalized: float
    err: float


@dataclass
class ScalingReport:
    config: dict
    rows: list
    I: float
    mu_hat: float
    limit: float
    fitted_delta: float
    slow_convergence: bool
    warnings: list = field(default_factory=list)

    def payload(self) -> dict:
        return {
            "config": self.config,
            "I": self.I,
            "mu_hat": self.mu_hat,
            "limit": self.limit,
            "fitted_delta": self.fitted_delta,
            "slow_convergence": self.slow_convergence,
            "warnings": self.warnings,
            "rows": [
                {"T": r.T, "W": r.W, "normalized": r.normalized, "err": r.err}
                for r in self.rows
            ],
        }


def scaling_sweep(
    spec: LatticeSpec,
    u,
    f: TestFunction,
    T_grid,
    alpha: float,
    mu_hat: float | None = None,
    tol: float = 1e-6,
) -> ScalingReport:
    """W(T) = T^{-(1+alpha)} * sum of f(gamma u / T^alpha) over the T-ball.

    The limit is (2/mu) * I(f, u) independently of alpha: shrinking the
    argument by T^alpha is absorbed by the homogeneity of the star
    product.  If mu_hat is given (say, from a convergence study), rows
    also carry W normalized by 2/mu_hat for direct comparison with I.
    """
    alpha = float(alpha)
    cfg = ExperimentConfig(spec, tuple(_floats(u)), f, list(T_grid), alpha, 0, tol)
    warnings = []
    w = _slope_warning(spec, u)
    if w:
        warnings.append(w)
    if spec.kind == LatticeKind.SL2Z and not w:
        beta = classify_slope(cf_expand(slope_of(u))).beta
        if beta > 2 and alpha <= -1.0 / (beta - 1.0):
            warnings.append(
                {
                    "kind": "alpha-out-of-range",
                    "detail": f"alpha={alpha} is at or below -1/(beta-1) for beta={beta}",
                }
            )
    ux, uy = _floats(u)
    I = density_integral(f, (ux, uy), tol, spec.norm)
    grid = [float(t) for t in T_grid]
    T_max = grid[-1]
    scales = [t**alpha for t in grid]
    r_lo = float(f.r_f) * min(scales)
    r_hi = float(f.R_f) * max(scales)
    coeffs, points = fastball.orbit_hits(spec, T_max, (ux, uy), r_lo, r_hi)
    rows = []
    for T, sc in zip(grid, scales):
        mask = fastball.membership_mask(spec, coeffs, T)
        vals = f.evaluate(points[mask] / sc)
        Wv = math.fsum(vals[vals != 0.0].tolist()) / T ** (1.0 + alpha)
        rows.append((T, Wv))
    if mu_hat is None:
        # fit 2/mu from these rows directly: W -> (2/mu) I
        ws = np.array([wv for _, wv in rows])
        mu_fit = 2.0 * I / float(np.mean(ws[-2:])) if len(rows) >= 2 else math.nan
    else:
        mu_fit = float(mu_hat)
    limit = 2.0 * I / mu_fit if mu_fit else math.nan
    out = [
        ScalingRow(T=T, W=Wv, normalized=Wv * mu_fit / 2.0, err=abs(Wv - limit))
        for T, Wv in rows
    ]
    delta = _fit_exponent([r.T for r in out[:-1]], [r.err for r in out[:-1]])
    return ScalingReport(
        config=cfg.as_dict(), rows=out, I=I, mu_hat=mu_fit, limit=limit,
        fitted_delta=delta, slow_convergence=bool(1.0 - abs(alpha) < 0.1),
        warnings=warnings,
    )


@dataclass
class TargetRow:
    T: float
    distance: float
    coeffs: tuple


@dataclass
class TargetReport:
    config: dict
    rows: list
    nonincreasing: bool
    loglog_slope: float

    def payload(self) -> dict:
        return {
            "config": self.config,
            "nonincreasing": self.nonincreasing,
            "loglog_slope": self.loglog_slope,
            "rows": [
                {"T": r.T, "distance": r.distance, "coeffs": list(r.coeffs)}
                for r in self.rows
            ],
        }


def shrinking_target_search(
    spec: LatticeSpec, u, v, T_grid
) -> TargetReport:
    """Best approximation of v by the orbit of u inside growing balls.

    Each row minimizes |gamma u - v| (sup-norm) over the exact T-ball;
    minima are nonincreasing in T by containment, and a negative
    log-log slope quantifies the improvement rate.
    """
    ux, uy = _floats(u)
    vx, vy = _floats(v)
    rows = []
    for T in (float(t) for t in T_grid):
        dist, coeffs = fastball.target_min(spec, T, (ux, uy), (vx, vy))
        rows.append(TargetRow(T=T, distance=dist, coeffs=tuple(int(c) for c in coeffs)))
    noninc = all(b.distance <= a.distance * (1 + 1e-12) for a, b in zip(rows, rows[1:]))
    slope = _fit_exponent([r.T for r in rows], [r.distance for r in rows])
    cfg = {
        "lattice": spec.kind.value,
        "norm": spec.norm.value,
        "u": [ux, uy],
        "v": [vx, vy],
        "T_grid": [float(t) for t in T_grid],
    }
    return TargetReport(config=cfg, rows=rows, nonincreasing=noninc, loglog_slope=slope)


def cloud_points(
    spec: LatticeSpec, u, T: float, window: float
) -> tuple[np.ndarray, np.ndarray]:
    """All gamma u landing in the square view window [-w, w]^2.

    Returns (coeffs, points) in canonical coefficient order; the point
    count scales like T * window, which is what makes the fixed
    T*window clouds of the scaling picture comparable.
    """
    ux, uy = _floats(u)
    w = float(window)
    if w <= 0:
        raise ValueError("window must be positive")
    coeffs, points = fastball.orbit_hits(spec, float(T), (ux, uy), 0.0, w)
    keep = (np.abs(points[:, 0]) <= w) & (np.abs(points[:, 1]) <= w)
    return coeffs[keep], points[keep]


def xi_hat_for_run(f: TestFunction, T: float, u) -> float:
    """Diophantine window bound at the support window of (f, T, u)."""
    if T < 1:
        raise ValueError("need T >= 1")
    z = slope_of(u)
    v = as_vec(u)
    su = max(abs(v.x), abs(v.y))
    tau1 = max(0.0, math.log(float(T) * float(su) / float(f.R_f)))
    tau2 = max(0.0, math.log(float(T) * float(su) / float(f.r_f)))
    if tau1 > tau2:
        tau1 = tau2
    return cusp_window_bound(z, tau1, tau2)


def run_is_admissible(f: TestFunction, T: float, u, c: float = 4.0) -> bool:
    """Threshold T >= c |u| xi-hat / R_f for theorem-grade windows."""
    v = as_vec(u)
    su = max(abs(float(v.x)), abs(float(v.y)))
    return float(T) >= c * su * xi_hat_for_run(f, T, u) / float(f.R_f)
