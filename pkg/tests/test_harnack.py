from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from sosmult.bounds import curve_invariants
from sosmult.curves import deltoid, deltoid_cusps, deltoid_point, quartic_triple_point
from sosmult.harnack import (
    HarnackSpec,
    NodeReport,
    WitnessError,
    default_roots,
    detect_nodes,
    distance_quadric,
    harnack_forms,
    harnack_parametrization,
    make_nonnegative_witness,
)
from sosmult.polygon import LatticePolygon, PolygonError, hirzebruch, interior_count, simplex, simplex2


def image(model, s):
    """Ambient image of a parameter value (``None`` is the point at infinity)."""
    hom = (1.0, 0.0) if s is None else (complex(s), 1.0)
    v = model.evaluate_forms(np.array(hom, dtype=complex))
    return v / v[np.argmax(np.abs(v))]


def test_default_roots_are_valid():
    for Q in (simplex(), simplex2(), hirzebruch(1, 0)):
        for t in (1, 2, 3):
            spec = HarnackSpec(Q, t)
            assert [len(e) for e in spec.roots] == [t * ell for ell in Q.lattice_lengths()]
            assert spec.roots == default_roots(Q, t)


def test_spec_validation():
    with pytest.raises(ValueError):
        HarnackSpec(simplex(), 0)
    with pytest.raises(ValueError):
        HarnackSpec(simplex(), 1, [[Fraction(1)], [Fraction(2)]])
    with pytest.raises(ValueError):
        HarnackSpec(simplex(), 1, [[Fraction(1)], [Fraction(3)], [Fraction(2)]])  # out of cyclic order
    with pytest.raises(PolygonError):
        HarnackSpec(LatticePolygon(((0, 0), (2, 0), (0, 1))), 1)


def test_form_degrees():
    for Q in (simplex(), simplex2(), hirzebruch(1, 0)):
        forms = harnack_forms(HarnackSpec(Q, 2))
        assert len(forms) == len(Q.dilate(1).lattice_points())
        assert {f.degree() for f in forms} == {2 * Q.two_area}


@pytest.mark.parametrize("Q,t", [(simplex(), 3), (simplex(), 4), (simplex2(), 2), (hirzebruch(1, 0), 2)])
def test_node_counts_equal_genus(Q, t):
    X = harnack_parametrization(HarnackSpec(Q, t))
    rep = detect_nodes(X)
    g = interior_count(Q, t)
    assert curve_invariants(X).p_a == g
    assert rep.count() == rep.count("solitary") == g
    for pair in rep.pairs:
        a, b = image(X, pair.s[0]), image(X, pair.s[1])
        assert np.max(np.abs(a - b)) < 1e-8  # both parameters map to the same point
        assert pair.s[0] is not None and abs(pair.s[0].imag) > 1e-6  # non-real preimages
        assert np.max(np.abs(np.imag(a))) < 1e-8  # real image point


def test_solitary_point_of_the_cubic():
    X = harnack_parametrization(HarnackSpec(simplex(), 3))
    rep = detect_nodes(X)
    assert rep.count() == 1
    p = np.real(rep.pairs[0].point)
    p = p / p[np.argmax(np.abs(p))]
    assert np.allclose(p, [-1 / 7, 1, 1], atol=1e-9)


def test_crossing_nodes_of_the_quartic():
    X = quartic_triple_point()
    rep = detect_nodes(X)
    assert rep.count("crossing") == 3 and rep.count() == 3
    params = set()
    for pair in rep.pairs:
        for z in pair.s:
            params.add(None if z is None else round(z.real, 9))
    assert params == {0.0, 1.0, None}


def test_report_json():
    X = harnack_parametrization(HarnackSpec(simplex(), 3))
    data = detect_nodes(X).to_json()
    assert data["counts"] == {"solitary": 1, "crossing": 0, "complex": 0}
    assert NodeReport().to_json()["pairs"] == []


def test_distance_quadric_sign():
    h = distance_quadric([0.5, -0.5, 1.0], 0.25, 2, 3)
    assert float(h([0.5, -0.5, 1.0])) == pytest.approx(-0.25)
    assert float(h([2.0, 0.0, 1.0])) > 0
    assert float(h([1.0, 1.0, 0.0])) > 0


def test_witness_on_smooth_point():
    X = deltoid()
    p = deltoid_point(0.9)
    w = make_nonnegative_witness(X, [p], 1)
    dense = np.array([deltoid_point(t) for t in np.linspace(0, 2 * np.pi, 20000)])
    vals = np.array([float(w.lift(list(q))) for q in dense])
    assert vals.min() > -1e-9
    assert abs(float(w.lift(list(p)))) < 1e-9


def test_witness_through_the_cusps():
    X = deltoid()
    w = make_nonnegative_witness(X, deltoid_cusps(), 3, chart=2)
    dense = np.array([deltoid_point(t) for t in np.linspace(0, 2 * np.pi, 10000)])
    vals = np.array([float(w.lift(list(q))) for q in dense])
    assert vals.min() > -1e-12
    for c in deltoid_cusps():
        assert abs(float(w.lift(list(c)))) < 1e-9
    assert w.degree == 6 and len(w.element) == X.hilbert_function(6)


def test_witness_input_checks():
    X = deltoid()
    with pytest.raises(ValueError):
        make_nonnegative_witness(X, [np.array([3.0, 0.0, 1.0])], 1)
    with pytest.raises(ValueError):
        make_nonnegative_witness(X, [deltoid_point(0.1)], 2)
    # a real point with x0 = 0 lies at infinity in the chart x0 = 1
    t = np.arccos((np.sqrt(12.0) - 2.0) / 4.0)
    assert abs(deltoid_point(t)[0]) < 1e-12
    with pytest.raises(WitnessError):
        make_nonnegative_witness(X, [deltoid_point(t)], 1, chart=0)
