"""Continued fractions as the bookkeeping behind orbit behavior.

Every slope z in [0, 1] carries an expansion [0; a_1, a_2, ...] whose
convergents p_k/q_k are the best rational approximations.  The return
times t_k, the exact error bounds, and the window bound xi_hat are all
read off the quotients; a single huge quotient is exactly what makes a
slope behave badly, and the spike detector at the end shows that.
"""

import math
from fractions import Fraction

from lattice_orbits.diophantine import (
    NAMED_SLOPES,
    beta_bound_check,
    cf_expand,
    cf_from_quotients,
    classify_slope,
    cusp_window_bound,
    tk_bounds_hold,
)

TOUR = [
    ("golden", NAMED_SLOPES["golden"]),
    ("sqrt2m1", NAMED_SLOPES["sqrt2m1"]),
    ("pi - 3", math.pi - 3.0),
    ("355/452", Fraction(355, 452)),
]

for label, z in TOUR:
    exp = cf_expand(z, 30)
    kind = ("finite" if exp.finite
            else "truncated" if exp.truncated else "infinite")
    quotients = ", ".join(str(exp.a(k)) for k in range(1, exp.depth + 1))
    print(f"z = {label} ({kind}): [0; {quotients}]")
    print(f"  {'k':>3s} {'p_k/q_k':>14s} {'|z - p_k/q_k|':>14s} "
          f"{'t_k':>8s} {'bounds':>7s}")
    for k in range(min(8, exp.depth)):
        p, q = exp.p[k], exp.q[k]
        err = float(exp.errors[k])
        t = exp.t_at(k)
        holds = tk_bounds_hold(exp, k)
        print(f"  {k:3d} {f'{p}/{q}':>14s} {err:14.3e} "
              f"{t:8.3f} {str(holds):>7s}")
    cls = classify_slope(exp)
    beta = "inf" if math.isinf(cls.beta) else f"{cls.beta:.3f}"
    print(f"  approximation exponent beta = {beta}, c = {cls.c:.3f}")
    for tau2 in (2.0, 8.0):
        print(f"  xi_hat over window [0, {tau2:g}] = "
              f"{cusp_window_bound(z, 0.0, tau2):.4f}")
    print()

# plant one huge quotient inside an otherwise golden-looking slope and
# compare against the generic exponent beta = 2: calm slopes keep the
# normalized window bound O(1), the planted quotient blows it up as
# soon as the window reaches deep enough
grid = [2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 22.0, 30.0]
calm = beta_bound_check(cf_expand(NAMED_SLOPES["golden"], 80), 2.0, grid)
print(f"golden vs beta=2: sup = {calm['sup']:.1f}, flagged = "
      f"{calm['flagged']}")
spike = float(cf_from_quotients([1] * 8 + [50000] + [1] * 30))
report = beta_bound_check(cf_expand(spike, 40), 2.0, grid)
print(f"planted a_9 = 50000: sup = {report['sup']:.0f}, median = "
      f"{report['median']:.1f}, flagged = {report['flagged']}")
print(f"  spike first visible at tau2 = {report['spike_tau2']:g} "
      f"(value {report['spike_value']:.0f})")
