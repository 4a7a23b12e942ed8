"""Degree bounds for sum-of-squares multipliers and the invariants that feed them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .algebra import binom
from .curves import CurveModel, stabilization_index

STABILIZATION_CAP = 60


@dataclass(frozen=True)
class CurveInvariants:
    d: int
    p_a: int
    r: int

    def hilbert_polynomial(self, m: int) -> int:
        return self.d * m + 1 - self.p_a


@dataclass
class BoundReport:
    d: int
    p_a: int
    r: int
    k_curve: int
    k_degree_only: int
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        assert self.k_curve >= 0 and self.k_curve >= self.r
        assert self.k_curve * self.d >= 2 * self.p_a - self.d + 1

    def to_json(self) -> dict:
        return {"d": self.d, "p_a": self.p_a, "r": self.r, "k_curve": self.k_curve,
                "k_degree_only": self.k_degree_only}


def curve_invariants(model: CurveModel, cap: int = STABILIZATION_CAP) -> CurveInvariants:
    """Degree, arithmetic genus and regularity index read off the Hilbert function.

    ``r`` may be ``-1`` (lines), since ``HF`` vanishes in negative degrees.
    """
    m0 = stabilization_index(model, cap)
    hf = [model.hilbert_function(m) for m in range(m0 + 4)]
    d = hf[m0 + 1] - hf[m0]
    if d < 1:
        raise ValueError("Hilbert function does not grow linearly; not a curve model")
    p_a = d * m0 + 1 - hf[m0]

    def agrees(m: int) -> bool:
        value = hf[m] if m >= 0 else 0
        return value == d * m + 1 - p_a

    r = m0 + 3
    while r - 1 >= -1 and agrees(r - 1):
        r -= 1
    return CurveInvariants(d, p_a, r)


def multiplier_degree_bound_curve(inv) -> int:
    """``max(r, ceil(2 p_a / d), 0)``."""
    d, p_a, r = _unpack(inv)
    if d < 1:
        raise ValueError("degree must be positive")
    return max(r, -((-2 * p_a) // d), 0)


def degree_only_bound(d: int, n: int) -> int:
    """Multiplier degree guaranteed for a curve of degree ``d`` spanning ``P^n``."""
    if d < 1 or n < 1:
        raise ValueError("d and n must be positive")
    return max(d - n + 1, 0)


def _unpack(inv):
    if isinstance(inv, dict):
        return int(inv["d"]), int(inv["p_a"]), int(inv["r"])
    if isinstance(inv, (tuple, list)):
        return tuple(int(x) for x in inv)
    return inv.d, inv.p_a, inv.r


def bound_report(model: CurveModel) -> BoundReport:
    inv = curve_invariants(model)
    n = model.hilbert_function(1) - 1
    return BoundReport(inv.d, inv.p_a, inv.r, multiplier_degree_bound_curve(inv),
                       degree_only_bound(inv.d, n),
                       notes={"d": "model", "p_a": "model", "r": "model", "n": f"HF(1) - 1 = {n}"})


@dataclass(frozen=True)
class CompleteIntersectionForms:
    deg: int
    p_a: int
    k_bound: int


def ci_closed_forms(degrees: Sequence[int]) -> CompleteIntersectionForms:
    """Closed forms for a complete-intersection curve cut out by forms of the given degrees."""
    degrees = [int(x) for x in degrees]
    if not degrees or any(x < 1 for x in degrees) or all(x == 1 for x in degrees):
        raise ValueError("need degrees >= 1 with at least one above 1")
    n = len(degrees) + 1
    deg = math.prod(degrees)
    s = sum(degrees)
    twice = deg * (s - n - 1) + 2
    assert twice % 2 == 0
    return CompleteIntersectionForms(deg, twice // 2, s - n)


@dataclass(frozen=True)
class SurfaceMargin:
    margin: int | Fraction
    holds: bool


def surface_inequality(HF: Callable[[int], int], m: int, j: int, k: int) -> SurfaceMargin:
    """Difference of the two sides of the dimension-count inequality for surfaces.

    ``m`` is the dimension of the variety; ``HF`` is evaluated as 0 in negative degrees.
    """
    if j < 1:
        raise ValueError("j must be at least 1")

    def h(i: int):
        return HF(i) if i >= 0 else 0

    margin = (m + 1) * (h(j + k) - h(k - j)) + h(2 * k) - binom(m + 1, 2) - h(2 * j + 2 * k)
    return SurfaceMargin(margin, margin > 0)


def hf_from_numerator(coeffs: Sequence, dim: int = 2) -> Callable[[int], int]:
    """Hilbert function of a Cohen-Macaulay variety with the given h-vector.

    ``coeffs[0] + coeffs[1] t + ...`` over ``(1 - t)^(dim + 1)``; values at
    negative arguments are 0.
    """
    coeffs = list(coeffs)

    def hf(i: int):
        if i < 0:
            return 0
        return sum(c * binom(i - q + dim, dim) for q, c in enumerate(coeffs) if i - q + dim >= dim)

    return hf


def minimal_surface_hf(n: int) -> Callable[[int], int]:
    """Surface of minimal degree in ``P^n``."""
    return hf_from_numerator([1, n - 2])


def p2_hf(i: int) -> int:
    return binom(i + 2, 2) if i >= 0 else 0


@dataclass(frozen=True)
class SurfaceSchedule:
    multiplier_degree: int
    product_degree: int


def surface_multiplier_schedule(kind: str, j: int, family: str = "4j") -> SurfaceSchedule:
    """Iterated multiplier degrees on minimal surfaces or the plane.

    For ``kind="p2"`` the input form has degree ``4j`` (``family="4j"``) or
    ``4j-2`` (``family="4j-2"``).
    """
    if kind == "minimal":
        if j < 1:
            raise ValueError("j must be at least 1")
        return SurfaceSchedule(j * j - j, j * j + j)
    if kind == "p2":
        if j < 2:
            raise ValueError("j must be at least 2 for the plane")
        if family == "4j":
            return SurfaceSchedule(2 * j * j - 2 * j, 2 * j * j + 2 * j)
        if family == "4j-2":
            return SurfaceSchedule(2 * j * j - 4 * j + 2, 2 * j * j)
        raise ValueError(f"unknown family {family!r}")
    raise ValueError(f"unknown surface kind {kind!r}")


def p2_schedule_for_degree(input_degree: int) -> SurfaceSchedule:
    """Pick the plane family whose input degree matches."""
    if input_degree % 4 == 0:
        return surface_multiplier_schedule("p2", input_degree // 4, "4j")
    if input_degree % 4 == 2:
        return surface_multiplier_schedule("p2", (input_degree + 2) // 4, "4j-2")
    raise ValueError("input degree must be even")
