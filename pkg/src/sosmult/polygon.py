"""Lattice polygons and the curve invariants of their toric embeddings."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

MAX_FREE_DILATE = 50


class PolygonError(ValueError):
    pass


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class LatticePolygon:
    """Convex lattice polygon, vertices counterclockwise without collinear triples."""

    vertices: tuple[tuple[int, int], ...]

    def __post_init__(self):
        verts = tuple((int(x), int(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        n = len(verts)
        if n < 3:
            raise PolygonError("a polygon needs at least three vertices")
        if len(set(verts)) != n:
            raise PolygonError("repeated vertex")
        for i in range(n):
            c = _cross(verts[i - 1], verts[i], verts[(i + 1) % n])
            if c == 0:
                raise PolygonError(f"collinear vertices around {verts[i]}")
            if c < 0:
                raise PolygonError("vertices must be listed counterclockwise and convex")
        if self.two_area <= 0:
            raise PolygonError("degenerate polygon")

    @classmethod
    def from_json(cls, data: dict) -> "LatticePolygon":
        return cls(tuple(tuple(v) for v in data["vertices"]))

    def to_json(self) -> dict:
        return {"vertices": [list(v) for v in self.vertices]}

    def edges(self) -> list[tuple[int, int]]:
        n = len(self.vertices)
        return [(self.vertices[(i + 1) % n][0] - self.vertices[i][0],
                 self.vertices[(i + 1) % n][1] - self.vertices[i][1]) for i in range(n)]

    def lattice_lengths(self) -> list[int]:
        return [math.gcd(abs(ex), abs(ey)) for ex, ey in self.edges()]

    @cached_property
    def two_area(self) -> int:
        v = self.vertices
        n = len(v)
        return sum(v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1] for i in range(n))

    def dilate(self, t: int) -> "LatticePolygon":
        if t < 1:
            raise PolygonError("dilation factor must be positive")
        return LatticePolygon(tuple((t * x, t * y) for x, y in self.vertices))

    def inner_normals(self) -> list[tuple[tuple[int, int], int]]:
        """Primitive inner normals ``u_i`` with offsets ``a_i``: ``<m, u_i> >= -a_i`` on the polygon."""
        out = []
        for (ex, ey), v in zip(self.edges(), self.vertices):
            g = math.gcd(abs(ex), abs(ey))
            u = (-ey // g, ex // g)
            out.append((u, -(v[0] * u[0] + v[1] * u[1])))
        return out

    def contains(self, m) -> bool:
        return all(m[0] * u[0] + m[1] * u[1] + a >= 0 for u, a in self.inner_normals())

    def lattice_points(self) -> list[tuple[int, int]]:
        """Enumerate lattice points in row-major order (y, then x)."""
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return [(x, y) for y in range(min(ys), max(ys) + 1) for x in range(min(xs), max(xs) + 1)
                if self.contains((x, y))]

    def interior_points(self) -> list[tuple[int, int]]:
        return [m for m in self.lattice_points()
                if all(m[0] * u[0] + m[1] * u[1] + a > 0 for u, a in self.inner_normals())]


@dataclass(frozen=True)
class PolygonInvariants:
    two_area: int
    boundary: int
    interior: int


def polygon_invariants(Q: LatticePolygon) -> PolygonInvariants:
    """Twice the area, boundary count (sum of edge gcds) and interior count via Pick."""
    B = sum(Q.lattice_lengths())
    two_i = Q.two_area - B + 2
    if two_i % 2:
        raise PolygonError("Pick's formula gave a non-integer interior count")
    return PolygonInvariants(Q.two_area, B, two_i // 2)


def is_smooth(Q: LatticePolygon) -> bool:
    """Whether every vertex cone is unimodular."""
    edges = Q.edges()
    lengths = Q.lattice_lengths()
    prim = [(ex // g, ey // g) for (ex, ey), g in zip(edges, lengths)]
    n = len(prim)
    for i in range(n):
        a = (-prim[i - 1][0], -prim[i - 1][1])
        b = prim[i]
        if abs(a[0] * b[1] - a[1] * b[0]) != 1:
            return False
    return True


def ehrhart(Q: LatticePolygon, i: int) -> int:
    """Number of lattice points of ``i Q``."""
    if i < 0:
        raise ValueError("dilation must be nonnegative")
    inv = polygon_invariants(Q)
    val = Fraction(inv.two_area, 2) * i * i + Fraction(inv.boundary, 2) * i + 1
    if val.denominator != 1:
        raise PolygonError("Ehrhart value is not integral")
    return int(val)


def interior_count(Q: LatticePolygon, t: int) -> int:
    """Interior lattice points of ``t Q`` (0 for ``t = 0``)."""
    if t <= 0:
        return 0
    inv = polygon_invariants(Q)
    return (inv.two_area * t * t - inv.boundary * t + 2) // 2


def free_dilate(Q: LatticePolygon) -> int:
    """Largest ``m`` such that ``m Q`` has no interior lattice point."""
    for t in range(1, MAX_FREE_DILATE + 1):
        if interior_count(Q, t) > 0:
            return t - 1
    raise PolygonError(f"no interior lattice points up to dilation {MAX_FREE_DILATE}")


@dataclass(frozen=True)
class ToricCurveInvariants:
    j: int
    d: int
    p_a: int
    r: int
    two_pa_over_d: Fraction

    def to_json(self) -> dict:
        return {"d": self.d, "p_a": self.p_a, "two_pa_over_d": str(self.two_pa_over_d), "r": self.r}


def toric_curve_invariants(Q: LatticePolygon, j: int) -> ToricCurveInvariants:
    """Invariants of a curve in the class ``(j-1) Q`` of the toric surface of ``Q``."""
    if not is_smooth(Q):
        raise PolygonError("polygon is not smooth")
    if j < 2:
        raise ValueError("j must be at least 2")
    d = Q.two_area * (j - 1)
    p_a = interior_count(Q, j - 1)
    r = j - 1 - free_dilate(Q)
    return ToricCurveInvariants(j, d, p_a, r, Fraction(2 * p_a, d))


def simplex() -> LatticePolygon:
    return LatticePolygon(((0, 0), (1, 0), (0, 1)))


def simplex2() -> LatticePolygon:
    return LatticePolygon(((0, 0), (2, 0), (0, 2)))


def hirzebruch(r: int, s: int) -> LatticePolygon:
    """Trapezoid ``conv{(0,0), (s+1,0), (r+s+1,1), (0,1)}``."""
    if r < 0 or s < 0:
        raise PolygonError("Hirzebruch parameters must be nonnegative")
    verts = [(0, 0), (s + 1, 0), (r + s + 1, 1), (0, 1)]
    return LatticePolygon(tuple(verts))


def polygon_by_name(name: str) -> LatticePolygon:
    if name == "simplex":
        return simplex()
    if name == "simplex2":
        return simplex2()
    if name.startswith("hirzebruch:"):
        try:
            r, s = (int(x) for x in name.split(":", 1)[1].split(","))
        except ValueError as exc:
            raise PolygonError(f"bad Hirzebruch spec {name!r}") from exc
        return hirzebruch(r, s)
    raise PolygonError(f"unknown polygon {name!r}")


BUILTIN_POLYGONS = ("simplex", "simplex2", "hirzebruch:r,s")
