from __future__ import annotations

from math import comb, ceil

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sosmult.algebra import Polynomial
from sosmult.bounds import (
    BoundReport,
    bound_report,
    ci_closed_forms,
    curve_invariants,
    degree_only_bound,
    hf_from_numerator,
    minimal_surface_hf,
    multiplier_degree_bound_curve,
    p2_hf,
    p2_schedule_for_degree,
    surface_inequality,
    surface_multiplier_schedule,
)
from sosmult.curves import ParamCurveModel, binary_line, deltoid, plane_model, quartic_triple_point


def test_deltoid_report():
    assert bound_report(deltoid()).to_json() == {"d": 4, "p_a": 3, "r": 2, "k_curve": 2, "k_degree_only": 3}


def test_plane_curve_invariants_follow_degree_genus_formula():
    x0, x1, x2 = Polynomial.variables(3)
    for d in range(2, 7):
        inv = curve_invariants(plane_model(x0**d + x1**d - x2**d))
        assert inv.d == d
        assert inv.p_a == comb(d - 1, 2)
        assert inv.r == d - 2


def test_rational_normal_curves_and_lines():
    s, t = Polynomial.variables(2)
    for d in range(1, 5):
        X = ParamCurveModel([s ** (d - i) * t**i for i in range(d + 1)])
        inv = curve_invariants(X)
        assert (inv.d, inv.p_a) == (d, 0)
        # HF(m) = dm + 1 for m >= 0; the value 0 at m = -1 agrees with -d + 1 only for lines
        assert inv.r == (-1 if d == 1 else 0)
    assert curve_invariants(binary_line()).r == -1


def test_quartic_invariants():
    inv = curve_invariants(quartic_triple_point())
    assert (inv.d, inv.p_a, inv.r) == (4, 3, 2)
    assert multiplier_degree_bound_curve(inv) == 2


@given(st.integers(1, 40), st.integers(0, 60), st.integers(-1, 20))
def test_bound_formula(d, p_a, r):
    k = multiplier_degree_bound_curve({"d": d, "p_a": p_a, "r": r})
    assert k == max(r, ceil(2 * p_a / d), 0)
    assert k * d >= 2 * p_a


def test_degree_only_bound():
    assert degree_only_bound(4, 2) == 3
    with pytest.raises(ValueError):
        degree_only_bound(0, 2)


def test_report_invariants_are_enforced():
    with pytest.raises(AssertionError):
        BoundReport(4, 3, 2, 1, 3)


def test_complete_intersections():
    f = ci_closed_forms([4])
    assert (f.deg, f.p_a, f.k_bound) == (4, 3, 2)
    f = ci_closed_forms([2, 2])
    assert (f.deg, f.p_a, f.k_bound) == (4, 1, 1)
    # plane curves of degree d: genus (d-1)(d-2)/2
    for d in range(2, 8):
        assert ci_closed_forms([d]).p_a == comb(d - 1, 2)
    with pytest.raises(ValueError):
        ci_closed_forms([1, 1])


def test_hf_from_numerator():
    # the plane, and the quadric surface (h-vector 1 + t)
    hf = hf_from_numerator([1])
    assert [hf(i) for i in range(6)] == [p2_hf(i) for i in range(6)]
    q = hf_from_numerator([1, 1])
    assert [q(i) for i in range(5)] == [(i + 1) ** 2 for i in range(5)]
    assert minimal_surface_hf(3)(-2) == 0


def test_surface_inequality_rejects_j0():
    with pytest.raises(ValueError):
        surface_inequality(p2_hf, 2, 0, 1)


def test_schedules():
    assert surface_multiplier_schedule("p2", 2) == p2_schedule_for_degree(8)
    s = p2_schedule_for_degree(6)
    assert (s.multiplier_degree, s.product_degree) == (2, 8)
    with pytest.raises(ValueError):
        surface_multiplier_schedule("cubic", 2)
    with pytest.raises(ValueError):
        p2_schedule_for_degree(7)
