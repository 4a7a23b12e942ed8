from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sosmult.polygon import (
    LatticePolygon,
    PolygonError,
    ehrhart,
    free_dilate,
    hirzebruch,
    interior_count,
    is_smooth,
    polygon_by_name,
    polygon_invariants,
    simplex,
    simplex2,
    toric_curve_invariants,
)


def brute_counts(Q: LatticePolygon):
    """Oracle: count lattice points by testing every point of the bounding box with cross products."""
    v = Q.vertices
    n = len(v)
    xs, ys = [p[0] for p in v], [p[1] for p in v]
    inside = boundary = 0
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            cr = [(v[(i + 1) % n][0] - v[i][0]) * (y - v[i][1]) - (v[(i + 1) % n][1] - v[i][1]) * (x - v[i][0])
                  for i in range(n)]
            if all(c > 0 for c in cr):
                inside += 1
            elif all(c >= 0 for c in cr):
                boundary += 1
    return inside, boundary


@st.composite
def triangles(draw):
    pts = [(draw(st.integers(-4, 4)), draw(st.integers(-4, 4))) for _ in range(3)]
    (ax, ay), (bx, by), (cx, cy) = pts
    cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    assume(cross != 0)
    return LatticePolygon(tuple(pts) if cross > 0 else (pts[0], pts[2], pts[1]))


@settings(max_examples=60, deadline=None)
@given(triangles(), st.integers(1, 3))
def test_pick_and_ehrhart_against_enumeration(T, t):
    Q = T.dilate(t)
    inside, boundary = brute_counts(Q)
    inv = polygon_invariants(Q)
    assert (inv.interior, inv.boundary) == (inside, boundary)
    assert ehrhart(T, t) == inside + boundary == len(Q.lattice_points())
    assert interior_count(T, t) == inside == len(Q.interior_points())


def test_fixture_invariants():
    assert polygon_invariants(simplex()) == polygon_invariants(LatticePolygon(((0, 0), (1, 0), (0, 1))))
    assert (polygon_invariants(simplex()).two_area, polygon_invariants(simplex()).boundary) == (1, 3)
    inv = polygon_invariants(simplex2())
    assert (inv.two_area, inv.boundary, inv.interior) == (4, 6, 0)
    inv = polygon_invariants(hirzebruch(1, 0))
    assert (inv.two_area, inv.boundary, inv.interior) == (3, 5, 0)


def test_smoothness():
    assert is_smooth(simplex()) and is_smooth(simplex2()) and is_smooth(hirzebruch(2, 1))
    assert not is_smooth(LatticePolygon(((0, 0), (2, 0), (0, 1))))


def test_free_dilate():
    assert free_dilate(simplex()) == 2
    assert free_dilate(simplex2()) == 1
    assert free_dilate(hirzebruch(1, 0)) == 1


def test_toric_examples():
    assert toric_curve_invariants(simplex2(), 3).to_json() == {"d": 8, "p_a": 3, "two_pa_over_d": "3/4", "r": 1}
    inv = toric_curve_invariants(simplex(), 4)
    assert (inv.d, inv.p_a, inv.r, inv.two_pa_over_d) == (3, 1, 1, Fraction(2, 3))
    with pytest.raises(PolygonError):
        toric_curve_invariants(LatticePolygon(((0, 0), (2, 0), (0, 1))), 3)


def test_validation():
    with pytest.raises(PolygonError):
        LatticePolygon(((0, 0), (0, 1), (1, 0)))  # clockwise
    with pytest.raises(PolygonError):
        LatticePolygon(((0, 0), (1, 0), (2, 0), (0, 1)))  # collinear
    with pytest.raises(PolygonError):
        polygon_by_name("square")
    assert polygon_by_name("hirzebruch:1,0") == hirzebruch(1, 0)
    Q = hirzebruch(2, 3)
    assert LatticePolygon.from_json(Q.to_json()) == Q
