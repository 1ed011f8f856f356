"""Continued fractions, approximation exponents and cusp excursions.

The central objects are the times t_k = -log|z - p_k/q_k| at which the
geodesic over a slope-z direction makes its k-th deepest excursion,
and the windowed quotient bound

    cusp_window_bound(z, tau1, tau2)
        = max( a_k : tau1 <= t_{k+1} and t_{k-1} <= tau2 ),

with e^{tau2} substituted when the index set is empty and a separate
branch for rational z (finite expansion, z = p_{k0}/q_{k0}):

    min( e^{tau2}, max( max{a_k : tau1 <= t_{k+1}}, e^{tau2}/q_{k0}^2 ) ),

where t_j = +inf for j > k0 and an empty inner max counts as 0.  The
excursion height itself is measured geometrically: reduce
z + i e^{-t} into the standard fundamental domain of the modular
group and take the largest imaginary part over a time window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .linalg import Vec2, as_vec
from .quadratic import Surd
from .reporting import write_csv

# Beyond q_k ~ 2^26 the quotients of a double-precision input are noise.
_FLOAT_Q_LIMIT = 1 << 26


def _exact_value(z):
    """Normalize input to Fraction, Surd or float."""
    if isinstance(z, (Fraction, int)):
        return Fraction(z)
    if isinstance(z, Surd):
        return z.as_fraction() if z.is_rational() else z
    return float(z)


@dataclass
class CFExpansion:
    """Continued fraction z = [0; a_1, a_2, ...] with convergent data.

    Lists are indexed by convergent number k = 0..depth with
    p[0]/q[0] = 0/1; partial_quotients[k-1] is a_k.  t[k] is
    -log|z - p_k/q_k|, +inf at and beyond an exact rational hit.
    errors[k] keeps |z - p_k/q_k| exactly when z was exact.
    """

    value: object
    z: float
    partial_quotients: list[int]
    p: list[int]
    q: list[int]
    t: list[float]
    errors: list
    finite: bool
    k0: int | None
    truncated: bool = False
    warnings: list[str] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.partial_quotients)

    def a(self, k: int) -> int:
        """Partial quotient a_k, k >= 1."""
        return self.partial_quotients[k - 1]

    def convergent(self, k: int) -> Fraction:
        return Fraction(self.p[k], self.q[k])

    def t_at(self, j: int) -> float:
        """t_j with the convention t_j = +inf past a rational endpoint."""
        if j < len(self.t):
            return self.t[j]
        if self.finite:
            return math.inf
        raise IndexError(f"t_{j} beyond computed depth {len(self.t) - 1}")

    def exact(self) -> bool:
        return not isinstance(self.value, float)


def _error_and_t(value, p: int, q: int) -> tuple[object, float]:
    if isinstance(value, float):
        err = abs(value - p / q)
    else:
        err = abs(value - Fraction(p, q))
    e = float(err)
    return err, (math.inf if e == 0.0 else -math.log(e))


def cf_expand(z, depth: int = 40) -> CFExpansion:
    """Continued fraction expansion of z in [0, 1].

    Exact inputs (int, Fraction, rational or quadratic Surd) are
    expanded exactly to any depth; floats stop early with
    ``truncated = True`` once q_k passes the precision horizon.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    value = _exact_value(z)
    zf = float(value)
    if zf < 0.0 or zf > 1.0:
        raise ValueError(f"slope {zf} outside [0, 1]")

    quotients: list[int] = []
    p = [0]
    q = [1]
    finite = False
    truncated = False
    w = value  # current tail in [0, 1]
    pm1, qm1 = 1, 0  # p_{-1}, q_{-1}
    for _ in range(depth):
        if isinstance(w, float):
            if w <= 0.0:
                finite = True
                break
            inv = 1.0 / w
            a = int(math.floor(inv))
            w = inv - a
        else:
            if (isinstance(w, Fraction) and w == 0) or (
                isinstance(w, Surd) and w.is_rational() and w.as_fraction() == 0
            ):
                finite = True
                break
            inv = 1 / w if isinstance(w, Fraction) else w.inverse()
            a = int(math.floor(inv)) if isinstance(inv, Fraction) else inv.floor()
            w = inv - a
        if a < 1:
            raise ArithmeticError(f"nonpositive quotient {a}; input outside [0, 1]?")
        quotients.append(a)
        p.append(a * p[-1] + pm1)
        q.append(a * q[-1] + qm1)
        pm1, qm1 = p[-2], q[-2]
        if isinstance(value, float) and q[-1] > _FLOAT_Q_LIMIT:
            truncated = True
            break

    errors = []
    t = []
    for k in range(len(p)):
        err, tk = _error_and_t(value, p[k], q[k])
        errors.append(err)
        t.append(tk)
    k0 = None
    if finite or (t and math.isinf(t[-1])):
        finite = True
        k0 = len(p) - 1
    exp = CFExpansion(
        value=value,
        z=zf,
        partial_quotients=quotients,
        p=p,
        q=q,
        t=t,
        errors=errors,
        finite=finite,
        k0=k0,
        truncated=truncated,
    )
    if truncated:
        exp.warnings.append(
            f"float input: expansion truncated at q_k = {q[-1]} (precision horizon)"
        )
    return exp


def cf_from_quotients(quotients: list[int]) -> Fraction:
    """Exact value of the finite continued fraction [0; a_1, ..., a_n]."""
    p, pm1 = 0, 1
    q, qm1 = 1, 0
    for a in quotients:
        if a < 1:
            raise ValueError("quotients must be positive")
        p, pm1 = a * p + pm1, p
        q, qm1 = a * q + qm1, q
    return Fraction(p, q)


def tk_bounds_hold(exp: CFExpansion, k: int) -> bool:
    """Exact check of a_{k+1} q_k^2 <= e^{t_k} <= (a_{k+1}+2) q_k^2.

    Equivalent to 1/((a_{k+1}+2) q_k^2) <= |z - p_k/q_k| <= 1/(a_{k+1} q_k^2),
    which is decidable in exact arithmetic whenever z was exact.
    """
    if k + 1 > exp.depth:
        raise IndexError(f"need a_{k + 1}; expansion depth {exp.depth}")
    a_next = exp.a(k + 1)
    qk2 = exp.q[k] ** 2
    err = exp.errors[k]
    lo = Fraction(1, (a_next + 2) * qk2)
    hi = Fraction(1, a_next * qk2)
    if isinstance(err, float):
        return lo * (1 - 1e-9) <= err <= hi * (1 + 1e-9)
    return lo <= err <= hi


def _as_expansion(z, tau2: float) -> CFExpansion:
    if isinstance(z, CFExpansion):
        return z
    depth = 24
    while True:
        exp = cf_expand(z, depth)
        if exp.finite or exp.truncated:
            return exp
        # Need indices k with t_{k-1} <= tau2; expand a little past that.
        if len(exp.t) >= 3 and exp.t[-3] > tau2:
            return exp
        if depth > 100_000:
            return exp
        depth *= 2


def cusp_window_bound(z, tau1: float, tau2: float) -> float:
    """Windowed partial-quotient bound controlling cusp excursions.

    See the module docstring for the exact branch structure.  z may be
    a number (exact types preferred) or a ready CFExpansion.
    """
    if not 0 <= tau1 <= tau2:
        raise ValueError(f"need 0 <= tau1 <= tau2, got ({tau1}, {tau2})")
    exp = _as_expansion(z, tau2)
    if exp.finite:
        k0 = exp.k0
        inner = 0
        for k in range(1, k0 + 1):
            if exp.t_at(k + 1) >= tau1:
                inner = max(inner, exp.a(k))
        qk0 = exp.q[k0]
        return min(math.exp(tau2), max(float(inner), math.exp(tau2) / qk0**2))
    best = 0
    for k in range(1, exp.depth):  # k+1 <= depth keeps t_{k+1} computed
        if exp.t[k + 1] >= tau1 and exp.t[k - 1] <= tau2:
            best = max(best, exp.a(k))
    if best == 0:
        return math.exp(tau2)
    return float(best)


def slope_of(u) -> object:
    """Representative slope in [0, 1] of the line through u.

    Exactly one of {ux/uy, ux/uy + 1, -uy/ux, -uy/ux + 1} lands in
    [0, 1] away from boundary ties; ties return the smaller candidate.
    Exact inputs (Fraction / Surd components) give exact output.
    """
    u = as_vec(u)
    ux, uy = u.x, u.y
    if (float(ux), float(uy)) == (0.0, 0.0):
        raise ValueError("slope of the zero vector")
    candidates = []
    if float(uy) != 0.0:
        r = ux / uy if not isinstance(ux, int) or not isinstance(uy, int) else Fraction(ux, uy)
        candidates.extend([r, r + 1])
    if float(ux) != 0.0:
        r = -uy / ux if not isinstance(ux, int) or not isinstance(uy, int) else Fraction(-uy, ux)
        candidates.extend([r, r + 1])
    in_range = [c for c in candidates if 0 <= _le_key(c) and _le_key(c) <= 1]
    if not in_range:
        raise ArithmeticError(f"no slope candidate in [0,1] for u = {u}")
    return min(in_range, key=_le_key)


def _le_key(c):
    return float(c)


@dataclass(frozen=True)
class SlopeClass:
    """Diophantine class |z - p/q| >= c q^{-beta} over tested convergents."""

    beta: float
    c: float


def classify_slope(exp: CFExpansion) -> SlopeClass:
    """Largest empirical c with |z - p_k/q_k| >= c q_k^{-beta_fit}.

    beta is fitted as max over convergents of -log err / log q (the
    smallest exponent consistent with the data); rationals get
    beta = inf by convention.
    """
    if exp.finite:
        return SlopeClass(beta=math.inf, c=1.0)
    beta = 2.0
    for k in range(1, len(exp.q) - 1):
        e = float(exp.errors[k])
        if e > 0 and exp.q[k] > 1:
            beta = max(beta, -math.log(e) / math.log(exp.q[k]))
    c = min(
        float(exp.errors[k]) * exp.q[k] ** beta
        for k in range(1, len(exp.q))
        if float(exp.errors[k]) > 0
    )
    return SlopeClass(beta=beta, c=c)


def beta_bound_check(exp: CFExpansion, beta: float, tau2_grid: list[float]) -> dict:
    """Empirical check of cusp_window_bound(z,0,tau2) << e^{(beta-2)tau2/beta}.

    Returns the per-window ratios, their supremum, and a spike flag
    (supremum an order of magnitude above the median ratio), which is
    what a planted huge partial quotient triggers.
    """
    rows = []
    for tau2 in tau2_grid:
        xi = cusp_window_bound(exp, 0.0, float(tau2))
        weight = math.exp(-(beta - 2.0) / beta * float(tau2)) if beta > 2 else 1.0
        rows.append((float(tau2), xi, xi * weight))
    ratios = sorted(r[2] for r in rows)
    sup = max(ratios)
    median = ratios[len(ratios) // 2]
    spike_tau2, spike_val = max(((r[0], r[2]) for r in rows), key=lambda rv: rv[1])
    return {
        "beta": beta,
        "rows": rows,
        "sup": sup,
        "median": median,
        "flagged": sup > 10.0 * max(median, 1e-30),
        "spike_tau2": spike_tau2,
        "spike_value": spike_val,
    }


def gauss_reduce(x: float, y: float, max_iter: int = 20000):
    """Reduce x + iy (y > 0) into {|z| >= 1, |Re z| <= 1/2}.

    Returns ((x', y'), word) where word is the integer matrix
    (a, b, c, d) with z' = (a z + b) / (c z + d), built from the
    translation and inversion moves of Gauss reduction.
    """
    if y <= 0:
        raise ValueError("need a point in the upper half plane")
    a, b, c, d = 1, 0, 0, 1
    for _ in range(max_iter):
        n = math.floor(x + 0.5)
        if n != 0:
            x -= n
            a, b = a - n * c, b - n * d
        w = x * x + y * y
        if w >= 1.0 - 1e-15:
            return (x, y), (a, b, c, d)
        x, y = -x / w, y / w
        a, b, c, d = -c, -d, a, b
    raise ArithmeticError("Gauss reduction did not terminate")


def mobius(word: tuple[int, int, int, int], x: float, y: float) -> tuple[float, float]:
    """Apply an integer matrix to x + iy by fractional linear action."""
    a, b, c, d = word
    den = (c * x + d) ** 2 + (c * y) ** 2
    return ((a * x + b) * (c * x + d) + a * c * y * y) / den, (a * d - b * c) * y / den


def _reduced_height(z: float, t: float) -> float:
    (_, y), _ = gauss_reduce(z, math.exp(-t))
    return y


def excursion_height(u, s1: float, s2: float, grid: int = 64) -> float:
    """Peak height of the geodesic over direction u during [s1, s2].

    The vertical geodesic z + i e^{-t} over z = slope_of(u) is reduced
    into the fundamental domain at each grid time; the returned value
    is the maximal imaginary part seen, with three rounds of bisection
    refinement around local maxima.  Endpoints are always included.
    """
    if not 0 <= s1 <= s2:
        raise ValueError(f"need 0 <= s1 <= s2, got ({s1}, {s2})")
    z = float(_le_key(slope_of(u)))
    times, heights = excursion_profile(z, s1, s2, grid)
    return max(heights)


def excursion_profile(z: float, s1: float, s2: float, grid: int = 64, refine: int = 3):
    """(times, reduced heights) for the geodesic over slope z."""
    n = max(2, int(math.ceil((s2 - s1) * grid))) + 1
    times = [s1 + (s2 - s1) * i / (n - 1) for i in range(n)]
    heights = [_reduced_height(z, t) for t in times]
    for _ in range(refine):
        new_times = []
        for i in range(len(times)):
            left_ok = i == 0 or heights[i] >= heights[i - 1]
            right_ok = i == len(times) - 1 or heights[i] >= heights[i + 1]
            if left_ok and right_ok:  # local max, including endpoints
                if i > 0:
                    new_times.append(0.5 * (times[i - 1] + times[i]))
                if i < len(times) - 1:
                    new_times.append(0.5 * (times[i] + times[i + 1]))
        merged = sorted(set(times) | set(new_times))
        hmap = dict(zip(times, heights))
        times = merged
        heights = [hmap[t] if t in hmap else _reduced_height(z, t) for t in times]
    return times, heights


def convergent_peak(exp: CFExpansion, k: int) -> tuple[float, float]:
    """Closed-form excursion peak for the k-th convergent.

    The geodesic over z comes closest to the cusp at time t_k, where
    the reduced height equals 1/(2 q_k^2 |z - p_k/q_k|); used as an
    oracle against the geometric computation.
    """
    err = float(exp.errors[k])
    if err == 0.0:
        raise ValueError("exact convergent: peak escapes to the cusp")
    return exp.t[k], 1.0 / (2.0 * exp.q[k] ** 2 * err)


NAMED_SLOPES: dict[str, object] = {
    "golden": Surd(-1, 1, 2, 5),  # (sqrt5 - 1)/2
    "sqrt2m1": Surd(-1, 1, 1, 2),  # sqrt2 - 1
    "sqrt3m1": Surd(-1, 1, 1, 3),  # sqrt3 - 1
    "invsqrt2": Surd(0, 1, 2, 2),  # 1/sqrt2
    "e2": math.e - 2.0,
    "inve": 1.0 / math.e,
}


def parse_slope(text) -> object:
    """Slope from a CLI-ish token: name, p/q, decimal or number."""
    if not isinstance(text, str):
        return _exact_value(text)
    token = text.strip().lower()
    if token in NAMED_SLOPES:
        return NAMED_SLOPES[token]
    if "/" in token:
        return Fraction(token)
    try:
        return Fraction(token)  # plain integer or decimal string, exact
    except ValueError:
        return float(token)


def slope_vector(z) -> Vec2:
    """Unit-sup-norm direction (z, 1) whose slope_of is z."""
    zf = float(_le_key(_exact_value(z) if not isinstance(z, CFExpansion) else z.value))
    if not 0 <= zf <= 1:
        raise ValueError("slope outside [0, 1]")
    return Vec2(zf, 1.0)


def write_cf_table(path, exp: CFExpansion, config: dict | None = None) -> None:
    rows = []
    for k in range(len(exp.p)):
        a_k = exp.partial_quotients[k - 1] if k >= 1 else 0
        rows.append((k, a_k, exp.p[k], exp.q[k], exp.t[k]))
    write_csv(path, ["k", "a_k", "p_k", "q_k", "t_k"], rows, config)


def write_excursion_trace(path, times, heights, config: dict | None = None) -> None:
    write_csv(path, ["t", "reduced_im"], zip(times, heights), config)
