"""Continued fractions, slope classification and geodesic excursions."""

import math
from fractions import Fraction

import pytest

from lattice_orbits.diophantine import (
    NAMED_SLOPES,
    beta_bound_check,
    cf_expand,
    cf_from_quotients,
    classify_slope,
    convergent_peak,
    cusp_window_bound,
    excursion_height,
    excursion_profile,
    gauss_reduce,
    mobius,
    parse_slope,
    slope_of,
    slope_vector,
    tk_bounds_hold,
)
from lattice_orbits.quadratic import Surd

GOLDEN = NAMED_SLOPES["golden"]
SQRT2M1 = NAMED_SLOPES["sqrt2m1"]


def fib(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def test_golden_expansion_is_all_ones_with_fibonacci_convergents():
    exp = cf_expand(GOLDEN, depth=50)
    assert exp.partial_quotients == [1] * 50
    assert exp.exact() and not exp.finite and not exp.truncated
    for k in range(0, 51):
        assert exp.p[k] == fib(k)
        assert exp.q[k] == fib(k + 1)
    # errors are exact quadratic numbers, strictly decreasing
    assert all(isinstance(e, Surd) for e in exp.errors[1:])
    assert all(exp.t[k] < exp.t[k + 1] for k in range(50))


def test_sqrt2m1_expansion_is_all_twos():
    exp = cf_expand(SQRT2M1, depth=30)
    assert exp.partial_quotients == [2] * 30
    # Pell recurrence q_{k+1} = 2 q_k + q_{k-1}
    for k in range(1, 30):
        assert exp.q[k + 1] == 2 * exp.q[k] + exp.q[k - 1]


def test_rational_expansion_terminates_exactly():
    exp = cf_expand(Fraction(7, 16), depth=40)
    assert exp.finite
    assert exp.partial_quotients == [2, 3, 2]
    assert exp.k0 == 3
    assert exp.convergent(3) == Fraction(7, 16)
    assert exp.errors[3] == 0
    assert exp.t_at(3) == math.inf
    assert exp.t_at(99) == math.inf  # past the endpoint by convention
    assert cf_from_quotients([2, 3, 2]) == Fraction(7, 16)


def test_float_expansion_matches_known_quotients_then_truncates():
    exp = cf_expand(math.pi - 3, depth=40)
    assert exp.partial_quotients[:4] == [7, 15, 1, 292]
    assert exp.truncated and not exp.finite
    assert exp.warnings
    with pytest.raises(IndexError):
        exp.t_at(80)


def test_cf_expand_validates_input():
    with pytest.raises(ValueError):
        cf_expand(1.5)
    with pytest.raises(ValueError):
        cf_expand(Fraction(1, 2), depth=0)


def test_tk_bounds_exact_for_quadratic_slopes():
    for z in (GOLDEN, SQRT2M1, NAMED_SLOPES["sqrt3m1"]):
        exp = cf_expand(z, depth=21)
        assert all(tk_bounds_hold(exp, k) for k in range(0, 20))
    exp = cf_expand(GOLDEN, depth=5)
    with pytest.raises(IndexError):
        tk_bounds_hold(exp, 5)


def test_cusp_window_bound_golden():
    # t_0 = -log z ~ 0.4812; an empty window falls back to e^{tau2}
    assert cusp_window_bound(GOLDEN, 0.0, 0.3) == math.exp(0.3)
    # all partial quotients are 1, so any populated window gives 1
    assert cusp_window_bound(GOLDEN, 0.0, 5.0) == 1.0
    assert cusp_window_bound(GOLDEN, 0.0, 25.0) == 1.0
    with pytest.raises(ValueError):
        cusp_window_bound(GOLDEN, 2.0, 1.0)


def test_cusp_window_bound_rational_growth():
    # past the last convergent the bound grows like e^{tau2} / q_{k0}^2
    z = Fraction(1, 3)
    for tau2 in (6.0, 8.0, 10.0):
        assert cusp_window_bound(z, 0.0, tau2) == pytest.approx(
            math.exp(tau2) / 9.0, rel=1e-12)


def test_classify_slope():
    # the fitted exponent is a max over convergents, so small-q noise
    # keeps it a bit above 2 even for badly approximable slopes
    hard = classify_slope(cf_expand(GOLDEN, depth=40))
    assert 2.0 <= hard.beta <= 3.5
    assert hard.c > 0
    # every tested convergent respects the fitted lower bound
    exp = cf_expand(GOLDEN, depth=40)
    for k in range(1, 40):
        assert float(exp.errors[k]) >= hard.c * exp.q[k] ** -hard.beta * (1 - 1e-12)
    rat = classify_slope(cf_expand(Fraction(3, 7)))
    assert rat.beta == math.inf


def test_beta_bound_check_flags_planted_spike():
    grid = [2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 22.0, 30.0]
    calm = beta_bound_check(cf_expand(GOLDEN, depth=80), 2.0, grid)
    assert not calm["flagged"]
    assert calm["sup"] == 1.0
    # plant one huge partial quotient; the float keeps enough digits
    # to recover the expansion well past the spike
    z = float(cf_from_quotients([1] * 8 + [50000] + [1] * 30))
    rep = beta_bound_check(cf_expand(z, depth=40), 2.0, grid)
    assert rep["flagged"]
    assert rep["spike_value"] >= 1e4


def test_gauss_reduce_lands_in_fundamental_domain():
    pts = [(0.7, 0.01), (-3.2, 0.4), (0.5, 2.0), (1.0 / 3.0, 1e-4)]
    for x0, y0 in pts:
        (x, y), word = gauss_reduce(x0, y0)
        assert abs(x) <= 0.5 + 1e-12
        assert x * x + y * y >= 1.0 - 1e-12
        a, b, c, d = word
        assert a * d - b * c == 1
        mx, my = mobius(word, x0, y0)
        assert (mx, my) == pytest.approx((x, y), abs=1e-9)
    with pytest.raises(ValueError):
        gauss_reduce(0.3, -1.0)


def test_excursion_height_matches_convergent_peak():
    exp = cf_expand(SQRT2M1, depth=12)
    u = slope_vector(SQRT2M1)
    for k in (3, 5):
        t_k, peak = convergent_peak(exp, k)
        got = excursion_height(u, max(0.0, t_k - 0.4), t_k + 0.4, grid=64)
        assert got == pytest.approx(peak, rel=1e-4)


def test_excursion_height_monotone_in_window():
    u = slope_vector(GOLDEN)
    hs = [excursion_height(u, 0.0, s2, grid=32) for s2 in (1.0, 3.0, 6.0, 9.0)]
    assert all(hs[i] <= hs[i + 1] + 1e-12 for i in range(len(hs) - 1))
    with pytest.raises(ValueError):
        excursion_height(u, 2.0, 1.0)


def test_excursion_profile_shape():
    times, heights = excursion_profile(float(GOLDEN), 0.0, 2.0, grid=16)
    assert times[0] == 0.0 and times[-1] == 2.0
    assert len(times) == len(heights)
    assert all(t1 < t2 for t1, t2 in zip(times, times[1:]))
    assert all(h >= math.sqrt(3) / 2 - 1e-12 for h in heights)


def test_slope_of_quadrant_reduction():
    assert slope_of((1, 2)) == Fraction(1, 2)
    assert slope_of((3, 2)) == Fraction(1, 3)  # uses -uy/ux + 1
    assert slope_of((-2, 3)) == Fraction(1, 3)
    assert slope_of((0, 5)) == 0
    z = slope_of(slope_vector(GOLDEN))
    assert float(z) == pytest.approx(float(GOLDEN), abs=1e-15)
    with pytest.raises(ValueError):
        slope_of((0, 0))


def test_parse_slope_tokens():
    assert parse_slope("golden") == GOLDEN
    assert parse_slope("3/7") == Fraction(3, 7)
    assert parse_slope("0.25") == Fraction(1, 4)
    assert parse_slope(Fraction(1, 2)) == Fraction(1, 2)
    with pytest.raises(ValueError):
        slope_vector(2.0)
