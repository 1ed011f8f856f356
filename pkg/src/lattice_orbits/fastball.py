"""Compiled scans over large norm balls.

The pure-Python enumeration in ``lattice`` is the reference; these
kernels reproduce it at the T where orbit experiments actually run
(tens of millions of elements).  Exactness is preserved by doing all
membership arithmetic on integers where possible (sl2z) and, where
floats are unavoidable (the quaternion embedding), by routing any
candidate within a safety margin of the boundary back to the exact
Z[sqrt2] checks.

All kernels are single-threaded on purpose: emission order, and hence
every downstream compensated sum, is deterministic bit for bit.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from numba import njit

from .lattice import LatticeElement, LatticeKind, LatticeSpec, quaternion_box_bounds
from .linalg import MatrixNorm

SQRT2 = math.sqrt(2.0)

_MODE_ALL = 0
_MODE_HITS = 1

# Soft cap on materialized elements; hit scans stay far below it.
_MAX_MATERIALIZED = 40_000_000


@njit(cache=True)
def _gcd64(a: int, b: int) -> int:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def _bezout(a: int, c: int):
    """(b0, d0) with a*d0 - c*b0 = 1, assuming gcd(a, c) = 1."""
    old_r, r = a, c
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return -old_t, old_s


@njit(cache=True)
def _isqrt64(n: int) -> int:
    if n <= 0:
        return 0
    t = int(math.sqrt(float(n)))
    while t * t > n:
        t -= 1
    while (t + 1) * (t + 1) <= n:
        t += 1
    return t


@njit(cache=True)
def _grow(arr):
    new = np.empty((arr.shape[0] * 2, arr.shape[1]), np.int64)
    new[: arr.shape[0]] = arr
    return new


@njit(cache=True)
def _k_range_abs(b0: int, step: int, bound: int):
    """k with |b0 + k*step| <= bound; (1, -1) encodes empty."""
    if step == 0:
        if abs(b0) <= bound:
            return -(1 << 60), 1 << 60
        return 1, -1
    if step < 0:
        b0, step = -b0, -step
    lo = -((bound + b0) // step)
    hi = (bound - b0) // step
    return lo, hi


@njit(cache=True)
def _sl2z_scan_max(N: int, ux: float, uy: float, rlo: float, rhi: float, mode: int):
    """Max-entry ball scan; returns (coeffs, count) in one pass.

    mode 0 emits every element, mode 1 only those with the orbit point
    gamma.u landing in the sup-norm annulus [rlo, rhi].
    """
    out = np.empty((1024, 4), np.int64)
    n = 0
    for a in range(-N, N + 1):
        for c in range(-N, N + 1):
            if _gcd64(a, c) != 1:
                continue
            b0, d0 = _bezout(a, c)
            lo1, hi1 = _k_range_abs(b0, a, N)
            if lo1 > hi1:
                continue
            lo2, hi2 = _k_range_abs(d0, c, N)
            lo = max(lo1, lo2)
            hi = min(hi1, hi2)
            for k in range(lo, hi + 1):
                b = b0 + k * a
                d = d0 + k * c
                if mode == _MODE_HITS:
                    px = a * ux + b * uy
                    py = c * ux + d * uy
                    s = max(abs(px), abs(py))
                    if s < rlo or s > rhi:
                        continue
                if n >= out.shape[0]:
                    out = _grow(out)
                out[n, 0] = a
                out[n, 1] = b
                out[n, 2] = c
                out[n, 3] = d
                n += 1
    return out[:n], n


@njit(cache=True)
def _sl2z_count_max(N: int) -> int:
    total = 0
    for a in range(-N, N + 1):
        for c in range(-N, N + 1):
            if _gcd64(a, c) != 1:
                continue
            b0, d0 = _bezout(a, c)
            lo1, hi1 = _k_range_abs(b0, a, N)
            if lo1 > hi1:
                continue
            lo2, hi2 = _k_range_abs(d0, c, N)
            lo = max(lo1, lo2)
            hi = min(hi1, hi2)
            if lo <= hi:
                total += hi - lo + 1
    return total


@njit(cache=True)
def _sl2z_k_bounds_q(A: int, B: int, C0: int, qmax: int):
    """Integer k interval of A k^2 + B k + C0 <= qmax; (1, -1) if empty."""
    disc = float(B * B - 4 * A * (C0 - qmax))
    if disc < 0.0:
        return 1, -1
    sq = math.sqrt(disc)
    lo = int(math.ceil((-B - sq) / (2 * A)))
    hi = int(math.floor((-B + sq) / (2 * A)))
    while A * (lo - 1) * (lo - 1) + B * (lo - 1) + C0 <= qmax:
        lo -= 1
    while lo <= hi and A * lo * lo + B * lo + C0 > qmax:
        lo += 1
    while A * (hi + 1) * (hi + 1) + B * (hi + 1) + C0 <= qmax:
        hi += 1
    while hi >= lo and A * hi * hi + B * hi + C0 > qmax:
        hi -= 1
    return lo, hi


@njit(cache=True)
def _sl2z_scan_q(qmax: int, ux: float, uy: float, rlo: float, rhi: float, mode: int):
    """Ball scan for the sum-of-squares bound a^2+b^2+c^2+d^2 <= qmax."""
    out = np.empty((1024, 4), np.int64)
    n = 0
    if qmax < 2:
        return out[:0], 0
    amax = _isqrt64(qmax - 1)
    for a in range(-amax, amax + 1):
        cmax = _isqrt64(qmax - 1 - a * a)
        for c in range(-cmax, cmax + 1):
            if _gcd64(a, c) != 1:
                continue
            b0, d0 = _bezout(a, c)
            A = a * a + c * c
            B = 2 * (a * b0 + c * d0)
            C0 = A + b0 * b0 + d0 * d0
            lo, hi = _sl2z_k_bounds_q(A, B, C0, qmax)
            for k in range(lo, hi + 1):
                b = b0 + k * a
                d = d0 + k * c
                if mode == _MODE_HITS:
                    px = a * ux + b * uy
                    py = c * ux + d * uy
                    s = max(abs(px), abs(py))
                    if s < rlo or s > rhi:
                        continue
                if n >= out.shape[0]:
                    out = _grow(out)
                out[n, 0] = a
                out[n, 1] = b
                out[n, 2] = c
                out[n, 3] = d
                n += 1
    return out[:n], n


@njit(cache=True)
def _sl2z_count_q(qmax: int) -> int:
    total = 0
    if qmax < 2:
        return 0
    amax = _isqrt64(qmax - 1)
    for a in range(-amax, amax + 1):
        cmax = _isqrt64(qmax - 1 - a * a)
        for c in range(-cmax, cmax + 1):
            if _gcd64(a, c) != 1:
                continue
            b0, d0 = _bezout(a, c)
            A = a * a + c * c
            B = 2 * (a * b0 + c * d0)
            C0 = A + b0 * b0 + d0 * d0
            lo, hi = _sl2z_k_bounds_q(A, B, C0, qmax)
            if lo <= hi:
                total += hi - lo + 1
    return total


@njit(cache=True)
def _sl2z_target_max(N: int, ux: float, uy: float, vx: float, vy: float):
    best = 1e300
    ba, bb, bc, bd = 1, 0, 0, 1
    for a in range(-N, N + 1):
        for c in range(-N, N + 1):
            if _gcd64(a, c) != 1:
                continue
            b0, d0 = _bezout(a, c)
            lo1, hi1 = _k_range_abs(b0, a, N)
            if lo1 > hi1:
                continue
            lo2, hi2 = _k_range_abs(d0, c, N)
            lo = max(lo1, lo2)
            hi = min(hi1, hi2)
            for k in range(lo, hi + 1):
                b = b0 + k * a
                d = d0 + k * c
                px = a * ux + b * uy
                py = c * ux + d * uy
                dist = max(abs(px - vx), abs(py - vy))
                if dist < best:
                    best = dist
                    ba, bb, bc, bd = a, b, c, d
    return best, ba, bb, bc, bd


@njit(cache=True)
def _sl2z_target_q(qmax: int, ux: float, uy: float, vx: float, vy: float):
    best = 1e300
    ba, bb, bc, bd = 1, 0, 0, 1
    if qmax < 2:
        return best, ba, bb, bc, bd
    amax = _isqrt64(qmax - 1)
    for a in range(-amax, amax + 1):
        cmax = _isqrt64(qmax - 1 - a * a)
        for c in range(-cmax, cmax + 1):
            if _gcd64(a, c) != 1:
                continue
            b0, d0 = _bezout(a, c)
            A = a * a + c * c
            B = 2 * (a * b0 + c * d0)
            C0 = A + b0 * b0 + d0 * d0
            lo, hi = _sl2z_k_bounds_q(A, B, C0, qmax)
            for k in range(lo, hi + 1):
                b = b0 + k * a
                d = d0 + k * c
                px = a * ux + b * uy
                py = c * ux + d * uy
                dist = max(abs(px - vx), abs(py - vy))
                if dist < best:
                    best = dist
                    ba, bb, bc, bd = a, b, c, d
    return best, ba, bb, bc, bd


@njit(cache=True)
def _quat_scan(
    X: int,
    Y: int,
    Z: int,
    norm_code: int,
    bound: float,
    ux: float,
    uy: float,
    rlo: float,
    rhi: float,
    mode: int,
):
    """Box scan of the quaternion unit group.

    Emits clear members to `out`, boundary-ambiguous candidates to
    `border` for exact re-checking by the caller.  norm_code 0 bounds
    the max entry by `bound`; codes 1 and 2 bound the entry sum of
    squares by `bound` (the caller folds the operator-norm correction
    into `bound`).
    """
    out = np.empty((1024, 4), np.int64)
    n = 0
    border = np.empty((64, 4), np.int64)
    nb = 0
    for x in range(-X, X + 1):
        for y in range(-Y, Y + 1):
            xy = 1 - x * x + 2 * y * y
            for z in range(-Z, Z + 1):
                base = xy + 3 * z * z
                if base < 0 or base % 6 != 0:
                    continue
                tsq = base // 6
                t0 = _isqrt64(tsq)
                if t0 * t0 != tsq:
                    continue
                t = -t0
                while True:
                    e1 = x + SQRT2 * y
                    e2 = z + SQRT2 * t
                    e3 = 3.0 * (z - SQRT2 * t)
                    e4 = x - SQRT2 * y
                    if norm_code == 0:
                        val = max(abs(e1), abs(e2), abs(e3), abs(e4))
                    else:
                        val = e1 * e1 + e2 * e2 + e3 * e3 + e4 * e4
                    margin = 1e-9 * (1.0 + val)
                    if val <= bound - margin:
                        ok = True
                        if mode == _MODE_HITS:
                            px = e1 * ux + e2 * uy
                            py = e3 * ux + e4 * uy
                            s = max(abs(px), abs(py))
                            ok = rlo <= s <= rhi
                        if ok:
                            if n >= out.shape[0]:
                                out = _grow(out)
                            out[n, 0] = x
                            out[n, 1] = y
                            out[n, 2] = z
                            out[n, 3] = t
                            n += 1
                    elif val <= bound + margin:
                        if nb >= border.shape[0]:
                            border = _grow(border)
                        border[nb, 0] = x
                        border[nb, 1] = y
                        border[nb, 2] = z
                        border[nb, 3] = t
                        nb += 1
                    if t == t0:
                        break
                    t = t0
    return out[:n], border[:nb]


def _norm_params(spec: LatticeSpec, T) -> tuple[int, int | float]:
    """Exact integer/float bound parameters for the kernels."""
    Tf = Fraction(T)
    if spec.norm == MatrixNorm.MAX_ENTRY:
        if spec.kind == LatticeKind.SL2Z:
            return 0, math.floor(Tf)
        return 0, float(T)
    qb = Tf * Tf
    if spec.norm == MatrixNorm.OPERATOR_2:
        if Tf < 1:
            return 1, 0
        qb = qb + 1 / (Tf * Tf)
    if spec.kind == LatticeKind.SL2Z:
        return 1, math.floor(qb)  # entry sum of squares is an integer
    return 1, float(qb)


def _resolve_border(spec: LatticeSpec, T, border: np.ndarray) -> list[tuple[int, ...]]:
    kept = []
    for row in border:
        g = LatticeElement(spec.kind, tuple(int(v) for v in row))
        if g.norm_within(T, spec.norm):
            kept.append(g.coeffs)
    return kept


def canonical_order(coeffs: np.ndarray) -> np.ndarray:
    """Rows sorted lexicographically by the integer quadruple."""
    coeffs = np.asarray(coeffs, dtype=np.int64).reshape(-1, 4)
    idx = np.lexsort((coeffs[:, 3], coeffs[:, 2], coeffs[:, 1], coeffs[:, 0]))
    return coeffs[idx]


def ball_coeffs_fast(spec: LatticeSpec, T) -> np.ndarray:
    """Materialized ball in canonical order, exact membership."""
    est = 14.0 * float(T) ** 2 + 64
    if est > _MAX_MATERIALIZED:
        raise ValueError(
            f"ball at T={T} would materialize ~{est:.0f} elements; "
            "use orbit_hits / ball_count_fast instead"
        )
    is_q, bound = _norm_params(spec, T)
    if spec.kind == LatticeKind.SL2Z:
        if is_q:
            arr, _ = _sl2z_scan_q(int(bound), 0.0, 0.0, 0.0, 0.0, _MODE_ALL)
        else:
            arr, _ = _sl2z_scan_max(int(bound), 0.0, 0.0, 0.0, 0.0, _MODE_ALL)
        return canonical_order(arr)
    X, Y, Z = quaternion_box_bounds(T)
    if X < 0:
        return np.empty((0, 4), np.int64)
    arr, border = _quat_scan(X, Y, Z, is_q, float(bound), 0.0, 0.0, 0.0, 0.0, _MODE_ALL)
    extra = _resolve_border(spec, T, border)
    if extra:
        arr = np.vstack([arr, np.array(extra, dtype=np.int64)])
    return canonical_order(arr)


def ball_count_fast(spec: LatticeSpec, T) -> int:
    is_q, bound = _norm_params(spec, T)
    if spec.kind == LatticeKind.SL2Z:
        if is_q:
            return int(_sl2z_count_q(int(bound)))
        return int(_sl2z_count_max(int(bound)))
    X, Y, Z = quaternion_box_bounds(T)
    if X < 0:
        return 0
    arr, border = _quat_scan(X, Y, Z, is_q, float(bound), 0.0, 0.0, 0.0, 0.0, _MODE_ALL)
    return arr.shape[0] + len(_resolve_border(spec, T, border))


def orbit_points(spec: LatticeSpec, coeffs: np.ndarray, u) -> np.ndarray:
    """gamma.u for each coefficient row, shape (n, 2) float64.

    Uses the same scalar expressions as the kernels, so a point passes
    a float filter here iff it passed in compiled code.
    """
    ux, uy = float(u[0]), float(u[1])
    coeffs = np.asarray(coeffs, dtype=np.int64).reshape(-1, 4)
    if spec.kind == LatticeKind.SL2Z:
        cf = coeffs.astype(np.float64)
        px = cf[:, 0] * ux + cf[:, 1] * uy
        py = cf[:, 2] * ux + cf[:, 3] * uy
    else:
        x, y, z, t = coeffs.astype(np.float64).T
        e1 = x + SQRT2 * y
        e2 = z + SQRT2 * t
        e3 = 3.0 * (z - SQRT2 * t)
        e4 = x - SQRT2 * y
        px = e1 * ux + e2 * uy
        py = e3 * ux + e4 * uy
    return np.column_stack([px, py])


def orbit_hits(spec: LatticeSpec, T, u, rlo: float, rhi: float):
    """Ball elements whose orbit point lies in a sup-norm annulus.

    The annulus filter is widened by a relative 1e-9 so no point whose
    exact sup-norm lies inside [rlo, rhi] can be lost to rounding; the
    caller's test function is what decides support membership.
    Returns (coeffs, points) in canonical order.
    """
    ux, uy = float(u[0]), float(u[1])
    lo = rlo * (1.0 - 1e-9) - 1e-12
    hi = rhi * (1.0 + 1e-9) + 1e-12
    is_q, bound = _norm_params(spec, T)
    if spec.kind == LatticeKind.SL2Z:
        if is_q:
            arr, _ = _sl2z_scan_q(int(bound), ux, uy, lo, hi, _MODE_HITS)
        else:
            arr, _ = _sl2z_scan_max(int(bound), ux, uy, lo, hi, _MODE_HITS)
    else:
        X, Y, Z = quaternion_box_bounds(T)
        if X < 0:
            arr = np.empty((0, 4), np.int64)
        else:
            arr, border = _quat_scan(X, Y, Z, is_q, float(bound), ux, uy, lo, hi, _MODE_HITS)
            kept = []
            for coeffs_t in _resolve_border(spec, T, border):
                p = orbit_points(spec, np.array([coeffs_t]), (ux, uy))[0]
                if lo <= max(abs(p[0]), abs(p[1])) <= hi:
                    kept.append(coeffs_t)
            if kept:
                arr = np.vstack([arr, np.array(kept, dtype=np.int64)])
    arr = canonical_order(arr)
    return arr, orbit_points(spec, arr, (ux, uy))


def target_min(spec: LatticeSpec, T, u, v) -> tuple[float, tuple[int, int, int, int]]:
    """min over the ball of sup|gamma.u - v|, with a witness element."""
    ux, uy = float(u[0]), float(u[1])
    vx, vy = float(v[0]), float(v[1])
    is_q, bound = _norm_params(spec, T)
    if spec.kind == LatticeKind.SL2Z:
        if is_q:
            best, a, b, c, d = _sl2z_target_q(int(bound), ux, uy, vx, vy)
        else:
            best, a, b, c, d = _sl2z_target_max(int(bound), ux, uy, vx, vy)
        return float(best), (int(a), int(b), int(c), int(d))
    X, Yb, Z = quaternion_box_bounds(T)
    if X < 0:
        raise ValueError("empty ball")
    arr, border = _quat_scan(X, Yb, Z, is_q, float(bound), 0.0, 0.0, 0.0, 0.0, _MODE_ALL)
    extra = _resolve_border(spec, T, border)
    if extra:
        arr = np.vstack([arr, np.array(extra, dtype=np.int64)])
    if arr.shape[0] == 0:
        raise ValueError("empty ball")
    pts = orbit_points(spec, arr, (ux, uy))
    dists = np.maximum(np.abs(pts[:, 0] - vx), np.abs(pts[:, 1] - vy))
    i = int(np.argmin(dists))
    return float(dists[i]), tuple(int(val) for val in arr[i])


def membership_mask(spec: LatticeSpec, coeffs: np.ndarray, T) -> np.ndarray:
    """Exact boolean mask ||gamma|| <= T for an (n, 4) coefficient array.

    Integer comparisons handle sl2z outright; for the quaternion group
    a float pre-pass decides clear rows and only boundary-ambiguous
    rows pay for exact Z[sqrt2] sign tests.
    """
    coeffs = np.asarray(coeffs, dtype=np.int64).reshape(-1, 4)
    Tf = Fraction(T)
    if spec.kind == LatticeKind.SL2Z:
        if spec.norm == MatrixNorm.MAX_ENTRY:
            return np.abs(coeffs).max(axis=1) <= math.floor(Tf)
        q = (coeffs.astype(object) ** 2).sum(axis=1)
        if spec.norm == MatrixNorm.FROBENIUS:
            qmax = math.floor(Tf * Tf)
        else:
            if Tf < 1:
                return np.zeros(coeffs.shape[0], dtype=bool)
            qmax = math.floor(Tf * Tf + 1 / (Tf * Tf))
        return np.array([int(v) <= qmax for v in q], dtype=bool)
    is_q, bound = _norm_params(spec, T)
    x, y, z, t = coeffs.astype(np.float64).T
    e1 = x + SQRT2 * y
    e2 = z + SQRT2 * t
    e3 = 3.0 * (z - SQRT2 * t)
    e4 = x - SQRT2 * y
    if is_q:
        val = e1 * e1 + e2 * e2 + e3 * e3 + e4 * e4
    else:
        val = np.maximum.reduce([np.abs(e1), np.abs(e2), np.abs(e3), np.abs(e4)])
    margin = 1e-9 * (1.0 + val)
    mask = val <= bound - margin
    unsure = np.flatnonzero(~mask & (val <= bound + margin))
    for i in unsure:
        g = LatticeElement(spec.kind, tuple(int(v) for v in coeffs[i]))
        mask[i] = g.norm_within(T, spec.norm)
    return mask
