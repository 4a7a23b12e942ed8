from __future__ import annotations

from fractions import Fraction
from math import comb

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from sosmult.algebra import FLOAT, Polynomial, exact_rank, monomials
from sosmult.curves import (
    ParamCurveModel,
    PlaneCurveModel,
    binary_line,
    curve_from_json,
    deltoid,
    deltoid_cusps,
    deltoid_equation,
    deltoid_point,
    exact_pivot_columns,
    p2,
    plane_model,
    quartic_triple_point,
)


def pullback_rank(forms, m):
    """Oracle: rank of the pullback matrix of degree-m monomials, via sympy."""
    s, t = sympy.symbols("s t")
    exprs = [sum(sympy.Rational(c.numerator, c.denominator) * s**e[0] * t**e[1] for e, c in f.items())
             for f in forms]
    rows = []
    for e in monomials(len(forms), m):
        g = sympy.Poly(sympy.expand(sympy.prod([x**k for x, k in zip(exprs, e)])), s, t)
        d = forms[0].degree() * m
        rows.append([g.coeff_monomial(s**(d - i) * t**i) for i in range(d + 1)])
    return sympy.Matrix(rows).rank()


def test_deltoid_equation_coefficients():
    h = deltoid_equation()
    assert h.coefficient((0, 0, 4)) == Fraction(-1, 3)
    assert h.coefficient((3, 0, 1)) == Fraction(-8, 3)
    for t in np.linspace(0, 6, 13):
        assert abs(float(h.to_float()(list(deltoid_point(t))))) < 1e-12


def test_plane_hilbert_function_matches_rank():
    X = deltoid()
    for m in range(9):
        assert X.hilbert_function(m) == X.hilbert_function_by_rank(m)
        assert X.hilbert_function(m) == comb(m + 2, 2) - (comb(m - 2, 2) if m >= 4 else 0)


def test_param_hilbert_function_against_sympy_rank():
    X = quartic_triple_point()
    for m in range(5):
        assert X.hilbert_function(m) == pullback_rank(X.forms, m)
    s, t = Polynomial.variables(2)
    cubic = ParamCurveModel([s**3, s**2 * t, s * t**2, t**3])
    for m in range(6):
        assert cubic.hilbert_function(m) == 3 * m + 1
    line = binary_line()
    assert [line.hilbert_function(m) for m in range(6)] == [1, 2, 3, 4, 5, 6]


def test_quartic_hilbert_function_stabilizes():
    X = quartic_triple_point()
    assert [X.hilbert_function(m) for m in range(6)] == [1, 3, 6, 10, 14, 18]


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=5, max_size=5), min_size=1, max_size=6))
def test_pivot_columns_are_maximal(vectors):
    piv = exact_pivot_columns(vectors, 5)
    assert len(piv) == exact_rank(vectors)
    assert exact_rank([vectors[i] for i in piv]) == len(piv)


@pytest.mark.parametrize("make", [deltoid, quartic_triple_point, p2])
def test_multiplication_matches_pointwise_values(make):
    X = make()
    pts = X.real_samples(7)
    for a, b in ((1, 1), (1, 2), (2, 2)):
        T = X.mult_tensor(a, b)
        for p in pts:
            va, vb, vab = X.evaluate_basis(a, p), X.evaluate_basis(b, p), X.evaluate_basis(a + b, p)
            lhs = np.outer(va, vb)
            rhs = np.einsum("uvw,w->uv", T, vab)
            assert np.allclose(lhs, rhs, atol=1e-9)


@pytest.mark.parametrize("make", [deltoid, quartic_triple_point])
def test_restriction_preserves_values_on_curve(make):
    X = make()
    x = Polynomial.variables(3)
    F = x[0] ** 2 * x[1] - Fraction(3, 2) * x[2] ** 3 + x[0] * x[1] * x[2]
    c = X.restrict(F)
    assert all(isinstance(v, Fraction) for v in c)
    for p in X.real_samples(9):
        val = float(F.to_float()(list(p)))
        assert abs(np.dot(X.evaluate_basis(3, p), [float(v) for v in c]) - val) < 1e-9


def test_restriction_of_the_equation_vanishes():
    X = deltoid()
    assert not any(X.restrict(deltoid_equation()))
    Y = quartic_triple_point()
    x0, x1, x2 = Polynomial.variables(3)
    implicit = x0**4 + x1**4 - x2 * x0 * x1 * (x0 - x1)
    assert not any(Y.restrict(implicit))
    assert any(Y.restrict(x0**4))


def test_real_samples_lie_on_curves():
    for X in (deltoid(), quartic_triple_point()):
        S = X.real_samples(200)
        assert len(S) > 50
        assert all(X.contains_point(p, 1e-7) for p in S)
    for c in deltoid_cusps():
        assert deltoid().contains_point(c)


@pytest.mark.parametrize("make", [deltoid, quartic_triple_point, p2, binary_line])
def test_curve_json_round_trip(make):
    X = make()
    Y = curve_from_json(X.to_json())
    assert Y.to_json() == X.to_json()
    assert [Y.hilbert_function(m) for m in range(4)] == [X.hilbert_function(m) for m in range(4)]


def test_invalid_models_are_rejected():
    s, t = Polynomial.variables(2)
    with pytest.raises(ValueError):
        ParamCurveModel([s * t, s * s])  # common root at s = 0
    with pytest.raises(ValueError):
        ParamCurveModel([s**2, t])
    x0, x1, x2 = Polynomial.variables(3)
    with pytest.raises(ValueError):
        PlaneCurveModel(x0 + x1)
    with pytest.raises(ValueError):
        plane_model(Polynomial.variables(3, FLOAT)[0] ** 2 + x1.to_float() ** 2)
