"""Rational Harnack curves on toric surfaces, their nodes, and nonnegative witnesses.

A rational curve in the toric surface of a smooth lattice polygon ``Q`` is
obtained by choosing, for each edge, a set of real roots on ``P^1`` and
sending the parameter to the monomials ``prod_i f_i^(<m, u_i> + a_i)`` for
the lattice points ``m`` of ``Q``. Listing the root sets along the real line
in the cyclic order of the edges produces a Harnack curve, whose only
singularities are isolated real double points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import EXACT, FLOAT, Polynomial
from .curves import CurveModel, ParamCurveModel, PlaneCurveModel
from .polygon import LatticePolygon, PolygonError, is_smooth

CLUSTER_TOL = 1e-8
RESIDUAL_FAIL = 1e-6
_ACCEPT = 1e-10
_SPURIOUS = 1e-4
_DPS = 40


class NodeDetectionError(RuntimeError):
    pass


class WitnessError(RuntimeError):
    """Raised when no distance ball isolates one of the requested points."""

    def __init__(self, message: str, diagnostic: dict | None = None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}


@dataclass
class HarnackSpec:
    Q: LatticePolygon
    t: int
    roots: list[list[Fraction]] | None = None

    def __post_init__(self):
        if self.t < 1:
            raise ValueError("t must be at least 1")
        if not is_smooth(self.Q):
            raise PolygonError("polygon is not smooth")
        if self.roots is None:
            self.roots = default_roots(self.Q, self.t)
        self.roots = [[Fraction(c) for c in edge] for edge in self.roots]
        lengths = self.Q.lattice_lengths()
        if len(self.roots) != len(lengths):
            raise ValueError("need one root list per edge")
        for i, (edge, ell) in enumerate(zip(self.roots, lengths)):
            if len(edge) != self.t * ell:
                raise ValueError(f"edge {i} needs {self.t * ell} roots, got {len(edge)}")
        flat = [c for edge in self.roots for c in edge]
        if len(set(flat)) != len(flat):
            raise ValueError("roots must be distinct")
        # intervals must be disjoint and follow the edge order around the circle
        spans = [(min(e), max(e)) for e in self.roots]
        start = min(range(len(spans)), key=lambda i: spans[i][0])
        order = spans[start:] + spans[:start]
        for (_, hi), (lo, _) in zip(order, order[1:]):
            if not hi < lo:
                raise ValueError("root intervals must be disjoint and cyclically ordered like the edges")

    def to_json(self) -> dict:
        return {"polygon": self.Q.to_json(), "t": self.t,
                "roots": [[str(c) for c in edge] for edge in self.roots]}


def default_roots(Q: LatticePolygon, t: int) -> list[list[Fraction]]:
    """Equally spaced rationals in ``(i, i + 1)`` for edge ``i``."""
    out = []
    for i, ell in enumerate(Q.lattice_lengths()):
        e = t * ell
        out.append([i + Fraction(k, e + 1) for k in range(1, e + 1)])
    return out


def harnack_forms(spec: HarnackSpec) -> list[Polynomial]:
    x0, x1 = Polynomial.variables(2)
    fs = []
    for edge in spec.roots:
        f = Polynomial.constant(2, 1)
        for c in edge:
            f = f * (x0 - c * x1)
        fs.append(f)
    normals = spec.Q.inner_normals()
    forms = []
    for m in spec.Q.lattice_points():
        phi = Polynomial.constant(2, 1)
        for f, (u, a) in zip(fs, normals):
            ex = m[0] * u[0] + m[1] * u[1] + a
            if ex < 0:
                raise PolygonError(f"negative exponent {ex} at lattice point {m}")
            phi = phi * f**ex
        forms.append(phi)
    expected = spec.Q.two_area * spec.t
    degs = {phi.degree() for phi in forms}
    if degs != {expected}:
        raise AssertionError(f"form degrees {sorted(degs)} differ from {expected}")
    return forms


def harnack_parametrization(spec: HarnackSpec) -> ParamCurveModel:
    """Parametrized curve in ``P^(|Q ∩ Z^2| - 1)`` with one coordinate per lattice point."""
    return ParamCurveModel(harnack_forms(spec))


# ---------------------------------------------------------------------------
# nodes


@dataclass
class NodePair:
    s: tuple[complex | None, complex | None]
    s_hom: tuple[tuple[complex, complex], tuple[complex, complex]]
    kind: str
    residual: float
    point: np.ndarray

    def to_json(self) -> dict:
        def enc(z):
            return None if z is None else [float(z.real), float(z.imag)]

        return {
            "s": enc(self.s[0]),
            "t": enc(self.s[1]),
            "s_hom": [[enc(c) for c in h] for h in self.s_hom],
            "kind": self.kind,
            "residual": self.residual,
        }


@dataclass
class NodeReport:
    pairs: list[NodePair] = field(default_factory=list)
    residual: float = 0.0

    def count(self, kind: str | None = None) -> int:
        return sum(1 for p in self.pairs if kind is None or p.kind == kind)

    def to_json(self) -> dict:
        return {"pairs": [p.to_json() for p in self.pairs], "residual": self.residual,
                "counts": {k: self.count(k) for k in ("solitary", "crossing", "complex")}}


_MOBIUS = [(3, 1, 1, 2), (5, -2, 2, 3), (7, 3, -3, 4), (2, 9, -5, 1)]


def _q(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(float(c)).limit_denominator(10**12)


def _moved_forms(model: ParamCurveModel, mob) -> list:
    """Dehomogenized forms after the parameter change ``(x0, x1) = (a u + b, c u + e)``."""
    import flint

    a, b, c, e = mob
    X0 = flint.fmpq_poly([b, a])
    X1 = flint.fmpq_poly([e, c])
    out = []
    for f in model.forms:
        p = flint.fmpq_poly([0])
        for (i0, i1), coef in f.items():
            q = _q(coef)
            p += flint.fmpq(q.numerator, q.denominator) * X0**i0 * X1**i1
        out.append(p)
    return out


def _mp(x):
    import mpmath as mp

    return mp.mpf(int(x.p)) / int(x.q)


def _mp_eval(poly, x):
    import mpmath as mp

    return mp.polyval([_mp(c) for c in reversed(poly.coeffs())], x)


def _wedge_residual(p, q) -> float:
    import mpmath as mp

    npn = mp.sqrt(sum(abs(x) ** 2 for x in p))
    nq = mp.sqrt(sum(abs(x) ** 2 for x in q))
    if npn == 0 or nq == 0:
        return math.inf
    worst = mp.mpf(0)
    for i in range(len(p)):
        for k in range(i + 1, len(p)):
            worst = max(worst, abs(p[i] * q[k] - p[k] * q[i]))
    return float(worst / (npn * nq))


def _roots_of(coeffs):
    """Complex roots of a polynomial given by mpmath coefficients, highest degree first."""
    import mpmath as mp

    coeffs = list(coeffs)
    top = max((abs(c) for c in coeffs), default=0)
    while coeffs and abs(coeffs[0]) <= mp.mpf(10) ** (-(_DPS - 5)) * top:
        coeffs.pop(0)
    if len(coeffs) <= 1:
        return []
    return mp.polyroots(coeffs, maxsteps=500, extraprec=2 * _DPS * 4)


def _exact_roots(poly) -> list:
    """Roots of an exact univariate polynomial as high-precision mpmath numbers."""
    import flint
    import mpmath as mp

    num, _den = poly.numer(), poly.denom()
    out = []
    old = flint.ctx.prec
    flint.ctx.prec = _DPS * 4
    try:
        _, factors = num.factor_squarefree()
        for fac, _mult in factors:
            if fac.degree() < 1:
                continue
            for z, _m in fac.complex_roots():
                re = mp.mpf(z.real.mid().str(_DPS, radius=False))
                im = mp.mpf(z.imag.mid().str(_DPS, radius=False))
                out.append(mp.mpc(re, im))
    finally:
        flint.ctx.prec = old
    return out


def detect_nodes(model: ParamCurveModel, rng_seed: int = 11) -> NodeReport:
    """All unordered parameter pairs mapping to one point, with classification.

    The parametrization is assumed birational onto its image. A point with
    ``r`` preimages contributes ``C(r, 2)`` pairs. Two random combinations of
    the divided minors ``(p_a(u) p_b(v) - p_b(u) p_a(v)) / (u - v)`` are
    eliminated by a resultant; candidate pairs are then checked against all
    minors in high precision.
    """
    import mpmath as mp

    if not isinstance(model, ParamCurveModel):
        raise TypeError("node detection needs a parametrized model")
    d = model.d
    if d <= 1:
        return NodeReport([], 0.0)
    if len(model.forms) == 2:
        raise NodeDetectionError("a map to P^1 of degree > 1 is not birational onto its image")
    rng = np.random.default_rng(rng_seed)
    last_error = None
    with mp.workdps(_DPS):
        for mob in _MOBIUS:
            polys = _moved_forms(model, mob)
            if _infinity_is_node(polys, d):
                last_error = "parameter at infinity is singular"
                continue
            try:
                return _solve_pairs(polys, mob, rng)
            except _Retry as exc:
                last_error = str(exc)
    raise NodeDetectionError(f"node detection failed: {last_error}")


class _Retry(Exception):
    pass


def _infinity_is_node(polys, d) -> bool:
    """Whether ``u = infinity`` shares its image with another parameter."""
    lead = [p.coeffs()[d] if p.degree() == d else 0 for p in polys]
    lead_mp = [_mp(c) if c else 0 for c in (_as_fmpq(x) for x in lead)]
    w = np.random.default_rng(3).standard_normal((len(polys), len(polys)))
    combo = None
    for a in range(len(polys)):
        for b in range(a + 1, len(polys)):
            term = (polys[a] * _as_fmpq(lead[b]) - polys[b] * _as_fmpq(lead[a])) * _rat(w[a, b])
            combo = term if combo is None else combo + term
    if combo is None or combo == 0:
        return False
    for root in _exact_roots(combo):
        vals = [_mp_eval(p, root) for p in polys]
        if _wedge_residual(vals, lead_mp) < _SPURIOUS:
            return True
    return False


def _as_fmpq(x):
    import flint

    return x if isinstance(x, flint.fmpq) else flint.fmpq(int(x))


def _rat(x: float):
    import flint

    q = Fraction(float(x)).limit_denominator(1000)
    return flint.fmpq(q.numerator, q.denominator)


def _bivariate(polys):
    import flint

    ctx = flint.fmpq_mpoly_ctx.get(("u", "v"), "lex")
    u, v = ctx.gens()

    def lift(p, var):
        out = ctx.from_dict({})
        for k, c in enumerate(p.coeffs()):
            if c != 0:
                out += c * var**k
        return out

    return ctx, u, v, [lift(p, u) for p in polys], [lift(p, v) for p in polys]


def _solve_pairs(polys, mob, rng) -> NodeReport:
    import flint
    import mpmath as mp

    ctx, u, v, Pu, Pv = _bivariate(polys)
    minors = []
    diag = u - v
    for a in range(len(polys)):
        for b in range(a + 1, len(polys)):
            num = Pu[a] * Pv[b] - Pu[b] * Pv[a]
            q, r = divmod(num, diag)
            assert r == 0
            if q != 0:
                minors.append(q)
    if len(minors) < 2:
        raise NodeDetectionError("too few independent minors to isolate pairs")
    for _attempt in range(4):
        w1 = [_rat(x) for x in rng.standard_normal(len(minors))]
        w2 = [_rat(x) for x in rng.standard_normal(len(minors))]
        G1 = sum((c * m for c, m in zip(w1, minors)), ctx.from_dict({}))
        G2 = sum((c * m for c, m in zip(w2, minors)), ctx.from_dict({}))
        res = G1.resultant(G2, "v")
        if res != 0:
            break
    else:
        raise NodeDetectionError("minors share a common factor; the parametrization is not birational")
    R = flint.fmpq_poly([0])
    for (i, _j), c in res.to_dict().items():
        R += c * flint.fmpq_poly([0] * int(i) + [1])
    g1 = {}
    for (i, j), c in G1.to_dict().items():
        g1.setdefault(int(j), []).append((int(i), _mp(c)))
    vdeg = max(g1)
    found = []
    worst = 0.0
    for uu in _exact_roots(R):
        vcoeffs = [sum((c * uu**i for i, c in g1.get(j, [])), mp.mpc(0)) for j in range(vdeg, -1, -1)]
        xu = [_mp_eval(p, uu) for p in polys]
        for vv in _roots_of(vcoeffs):
            if abs(uu - vv) <= 1e-6 * (1 + abs(uu)):
                continue
            xv = [_mp_eval(p, vv) for p in polys]
            r = _wedge_residual(xu, xv)
            if r > _SPURIOUS:
                continue
            if r > RESIDUAL_FAIL:
                raise NodeDetectionError(f"ill-conditioned pair with residual {r:.2e}")
            worst = max(worst, r)
            found.append((complex(uu), complex(vv), r, xu))
    pairs: list = []
    for a, b, r, xu in found:
        if any((_close(a, a2) and _close(b, b2)) or (_close(a, b2) and _close(b, a2)) for a2, b2, _, _ in pairs):
            continue
        pairs.append((a, b, r, xu))
    out = []
    for a, b, r, xu in pairs:
        ra = abs(a.imag) < CLUSTER_TOL * (1 + abs(a))
        rb = abs(b.imag) < CLUSTER_TOL * (1 + abs(b))
        if ra and rb:
            kind = "crossing"
            a, b = sorted((a.real + 0j, b.real + 0j), key=lambda z: z.real)
        elif _close(a, b.conjugate()):
            kind = "solitary"
            a, b = sorted((a, b), key=lambda z: -z.imag)
        else:
            kind = "complex"
        point = np.array([complex(x) for x in xu])
        k = int(np.argmax(np.abs(point)))
        point = point / point[k]
        if kind != "complex":
            point = point.real
        out.append(NodePair(tuple(_to_original(z, mob) for z in (a, b)),
                            tuple(_hom_original(z, mob) for z in (a, b)), kind, r, point))
    out.sort(key=lambda p: (p.kind, [(math.inf, 0.0) if z is None else (z.real, z.imag) for z in p.s]))
    return NodeReport(out, worst)


def _close(a: complex, b: complex) -> bool:
    return abs(a - b) <= CLUSTER_TOL * (1 + max(abs(a), abs(b)))


def _hom_original(z: complex, mob) -> tuple[complex, complex]:
    a, b, c, e = mob
    h = (a * z + b, c * z + e)
    n = math.hypot(abs(h[0]), abs(h[1]))
    return (h[0] / n, h[1] / n)


def _to_original(z: complex, mob) -> complex | None:
    h0, h1 = _hom_original(z, mob)
    if abs(h1) <= 1e-14:
        return None
    return h0 / h1


# ---------------------------------------------------------------------------
# nonnegative witnesses


@dataclass
class NonnegativeWitness:
    """Product of distance quadrics vanishing at prescribed real points."""

    element: list
    lift: Polynomial
    chart: int
    centers: list[np.ndarray]
    radii_sq: list[float]
    degree: int

    def to_json(self) -> dict:
        return {"degree": self.degree, "chart": self.chart, "lift": self.lift.to_json(),
                "centers": [c.tolist() for c in self.centers], "radii_sq": list(self.radii_sq)}


def distance_quadric(center: Sequence[float], eps: float, chart: int, nvars: int) -> Polynomial:
    """``sum_{l != chart} (x_l - q_l x_chart)^2 - eps * x_chart^2``."""
    xs = Polynomial.variables(nvars, mode=FLOAT)
    xc = xs[chart]
    h = -float(eps) * xc * xc
    for l in range(nvars):
        if l == chart:
            continue
        g = xs[l] - float(center[l]) * xc
        h = h + g * g
    return h


def _affine(p: np.ndarray, chart: int) -> np.ndarray:
    return np.asarray(p, float) / float(p[chart])


def _tangent_directions(model: CurveModel, p: np.ndarray, chart: int) -> list[np.ndarray]:
    """Affine tangent directions at ``p`` when the point is smooth; empty otherwise."""
    n = len(p)
    if isinstance(model, PlaneCurveModel):
        g = np.array(model.h.to_float().gradient(list(p)), float)
        if np.linalg.norm(g) <= 1e-8 * (1 + np.linalg.norm(p)):
            return []
        # tangent line in the chart: directions w with w_chart = 0 and g . w = 0
        w = np.zeros(n)
        others = [l for l in range(n) if l != chart]
        if len(others) != 2:
            return []
        w[others[0]], w[others[1]] = g[others[1]], -g[others[0]]
        return [w / np.linalg.norm(w)]
    if isinstance(model, ParamCurveModel):
        out = []
        for s in _real_preimages(model, p):
            xs = model.evaluate_forms(s)
            ds = np.array([float(np.dot(f.to_float().gradient(list(s)), [-s[1], s[0]])) for f in model.forms])
            lam = xs[chart]
            tang = (ds * lam - xs * ds[chart]) / (lam * lam)
            if np.linalg.norm(tang) > 1e-9:
                out.append(tang / np.linalg.norm(tang))
        return out
    return []


def _real_preimages(model: ParamCurveModel, p: np.ndarray) -> list[np.ndarray]:
    """Unit real parameters ``s`` with ``xi(s)`` proportional to ``p``."""
    from .curves import _binary_vec

    pn = np.asarray(p, float) / np.linalg.norm(p)
    F = [np.array([float(c) for c in _binary_vec(f, model.d)]) for f in model.forms]
    w = np.random.default_rng(13).standard_normal((len(F), len(F)))
    combo = np.zeros(model.d + 1)
    for a in range(len(F)):
        for b in range(a + 1, len(F)):
            combo += w[a, b] * (pn[a] * F[b] - pn[b] * F[a])
    cands = []
    nz = np.flatnonzero(np.abs(combo) > 1e-13 * max(np.abs(combo).max(), 1e-300))
    if nz.size:
        cands = [np.array([r.real, 1.0]) for r in np.roots(combo[nz[0]:]) if abs(r.imag) < 1e-7 * (1 + abs(r))]
    if nz.size == 0 or nz[0] > 0:
        cands.append(np.array([1.0, 0.0]))
    out = []
    for s in cands:
        s = s / np.linalg.norm(s)
        q = model.evaluate_forms(s)
        nq = np.linalg.norm(q)
        if nq == 0:
            continue
        q = q / nq
        if np.abs(np.outer(pn, q) - np.outer(q, pn)).max() < 1e-7:
            if not any(abs(abs(np.dot(s, o)) - 1) < 1e-9 for o in out):
                out.append(s)
    return out


def _candidate_directions(model, p, chart, samples_aff, pa) -> list[np.ndarray]:
    n = len(p)
    others = [l for l in range(n) if l != chart]
    dirs = []
    tang = _tangent_directions(model, p, chart)
    if tang and len(others) == 2:
        for t in tang:
            nrm = np.zeros(n)
            nrm[others[0]], nrm[others[1]] = -t[others[1]], t[others[0]]
            dirs.extend([nrm, -nrm])
    elif tang:
        rng = np.random.default_rng(5)
        for _ in range(64):
            w = np.zeros(n)
            w[others] = rng.standard_normal(len(others))
            for t in tang:
                w -= np.dot(w, t) * t
            if np.linalg.norm(w) > 1e-9:
                dirs.append(w / np.linalg.norm(w))
    else:
        # singular or isolated point: point away from nearby curve samples first
        diffs = samples_aff - pa
        dist = np.linalg.norm(diffs, axis=1)
        near = diffs[(dist > 1e-9) & (dist < 0.05 * (1 + np.linalg.norm(pa)))]
        if len(near):
            mean = near.mean(axis=0)
            if np.linalg.norm(mean) > 0:
                dirs.append(-mean / np.linalg.norm(mean))
        if len(others) == 2:
            for th in np.linspace(0, 2 * math.pi, 360, endpoint=False):
                w = np.zeros(n)
                w[others[0]], w[others[1]] = math.cos(th), math.sin(th)
                dirs.append(w)
        else:
            rng = np.random.default_rng(5)
            for _ in range(256):
                w = np.zeros(n)
                w[others] = rng.standard_normal(len(others))
                dirs.append(w / np.linalg.norm(w))
    return dirs


def make_nonnegative_witness(model: CurveModel, points: Sequence, j: int, chart: int | None = None,
                             samples: np.ndarray | None = None, sample_count: int = 4000) -> NonnegativeWitness:
    """Element of ``R_{2j}`` nonnegative on the real curve and vanishing at the ``j`` points.

    Each point ``p`` gets a ball in an affine chart touching the curve only at
    ``p``; the element is the product of the quadrics ``|x - q|^2 - eps``.
    """
    points = [np.asarray(p, float) for p in points]
    if len(points) != j:
        raise ValueError("need exactly j points")
    n = model.nvars
    if j == 0:
        one = Polynomial.constant(n, 1)
        return NonnegativeWitness(list(model.restrict(one)), one, 0, [], [], 0)
    for p in points:
        if p.shape != (n,):
            raise ValueError("point has the wrong number of coordinates")
        res = _model_residual(model, p)
        if res > 1e-9:
            raise ValueError(f"point {p.tolist()} is not on the curve (residual {res:.2e})")
    if chart is None:
        chart = max(range(n), key=lambda c: min(abs(p[c]) / np.linalg.norm(p) for p in points))
    if any(abs(p[chart]) < 1e-9 * np.linalg.norm(p) for p in points):
        raise WitnessError("a point lies at infinity in the chosen chart")
    if samples is None:
        samples = np.asarray(model.real_samples(sample_count), float)
    samp = samples[np.abs(samples[:, chart]) > 1e-12 * np.linalg.norm(samples, axis=1)]
    samp_aff = samp / samp[:, [chart]]
    centers, radii = [], []
    lift = Polynomial.constant(n, 1.0, mode=FLOAT)
    for p in points:
        pa = _affine(p, chart)
        ball = _find_ball(model, p, pa, chart, samp_aff)
        if ball is None:
            raise WitnessError("cannot isolate point", {"point": p.tolist()})
        q, rho = ball
        eps = float(np.sum((pa - q) ** 2))
        centers.append(q)
        radii.append(eps)
        lift = lift * distance_quadric(q, eps, chart, n)
        g = np.array(distance_quadric(q, eps, chart, n).gradient(list(pa)))
        if np.linalg.norm(g) < 1e-6 * (1 + np.linalg.norm(pa)):
            raise WitnessError("distance quadric has vanishing gradient", {"point": p.tolist()})
    return NonnegativeWitness(list(model.restrict(lift)), lift, chart, centers, radii, 2 * j)


def _model_residual(model: CurveModel, p) -> float:
    if isinstance(model, PlaneCurveModel):
        return model.equation_value(p)
    if isinstance(model, ParamCurveModel):
        return model.point_residual(p)
    return 0.0


def _find_ball(model, p, pa, chart, samp_aff):
    dirs = _candidate_directions(model, p, chart, samp_aff, pa)
    scale = 1 + np.linalg.norm(pa)
    for rho in [scale * 2.0**-k for k in range(1, 16)]:
        for w in dirs:
            q = pa + rho * w
            d2 = np.sum((samp_aff - q) ** 2, axis=1) - rho * rho
            # allow contact at p itself
            near_p = np.linalg.norm(samp_aff - pa, axis=1) < 1e-7 * scale
            if np.all((d2 >= -1e-12 * scale * scale) | near_p):
                if _local_check(model, p, pa, q, rho, chart):
                    return q, rho
    return None


def _local_check(model, p, pa, q, rho, chart) -> bool:
    """Dense sampling of the real curve near ``p`` stays outside the open ball."""
    if isinstance(model, ParamCurveModel):
        pts = []
        for s in _real_preimages(model, p):
            th0 = math.atan2(s[1], s[0])
            for dt in np.concatenate([-np.logspace(-6, -1, 200), np.logspace(-6, -1, 200)]):
                ss = np.array([math.cos(th0 + dt), math.sin(th0 + dt)])
                x = model.evaluate_forms(ss)
                if abs(x[chart]) > 1e-12:
                    pts.append(x / x[chart])
        if not pts:
            return True
        P = np.array(pts)
        return bool(np.all(np.sum((P - q) ** 2, axis=1) - rho * rho >= -1e-12 * (1 + rho * rho)))
    if isinstance(model, PlaneCurveModel):
        return _slice_check(model, pa, q, rho, chart)
    return True


def _slice_check(model: PlaneCurveModel, pa, q, rho, chart) -> bool:
    """Cut the ball by lines orthogonal to its axis and test the real intersections."""
    others = [l for l in range(3) if l != chart]
    w = (q - pa) / rho
    perp = np.zeros(3)
    perp[others[0]], perp[others[1]] = -w[others[1]], w[others[0]]
    hf = model.original.to_float()
    lam_var, one = Polynomial.variables(2, FLOAT)
    depths = np.unique(np.concatenate([2 * rho * np.logspace(-6, 0, 300), np.linspace(0, 2 * rho, 301)[1:-1]]))
    for delta in depths:
        base = pa + delta * w
        line = [lam_var * float(perp[i]) + one * float(base[i]) for i in range(3)]
        g = hf.compose(line)
        coeffs = np.array([g.coefficient((k, model.d - k)) for k in range(model.d, -1, -1)], float)
        nz = np.flatnonzero(np.abs(coeffs) > 1e-14 * np.abs(coeffs).max())
        if nz.size == 0:
            return False
        half_chord2 = 2 * rho * delta - delta * delta
        for r in np.roots(coeffs[nz[0]:]):
            if abs(r.imag) < 1e-9 * (1 + abs(r)) and r.real**2 < half_chord2 * (1 - 1e-9):
                return False
    return True
