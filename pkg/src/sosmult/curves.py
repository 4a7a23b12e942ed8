"""Computable models of graded coordinate rings of projective curves.

Three presentations are supported:

* :class:`PlaneCurveModel` -- ``R = S/(h)`` for a ternary form ``h``; graded
  pieces have the staircase basis of monomials whose exponent in a
  designated leading variable is below ``deg h``.
* :class:`ParamCurveModel` -- the image of ``P^1 -> P^n`` given by binary
  forms; ``R_m`` is identified with the span of all degree-``m`` monomials in
  the forms, inside the binary forms of degree ``d*m``.
* :class:`PolynomialRingModel` -- the full polynomial ring on ``P^n``.

Coordinate vectors are lists of :class:`~fractions.Fraction` when exact and
``numpy`` float arrays otherwise.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import (
    EXACT,
    FLOAT,
    Monomial,
    Polynomial,
    binom,
    exact_rank,
    monomial_index,
    monomials,
    rank_and_nullspace,
    SubspaceBasis,
)

FLOAT_RANK_RTOL = 1e-9


def is_float_vec(v) -> bool:
    if isinstance(v, np.ndarray):
        return v.dtype != object
    return any(isinstance(c, (float, np.floating)) for c in v)


def to_float_vec(v) -> np.ndarray:
    return np.array([float(c) for c in v], dtype=float)


class CurveModel:
    """Common interface: graded bases, Hilbert function and multiplication."""

    kind = "abstract"
    nvars: int

    def __init__(self):
        self._lock = threading.RLock()
        self._tables: dict[tuple[int, int], list] = {}
        self._tensors: dict[tuple[int, int], np.ndarray] = {}

    # subclasses provide these
    def hilbert_function(self, m: int) -> int:
        raise NotImplementedError

    def graded_basis(self, m: int) -> SubspaceBasis:
        raise NotImplementedError

    def _product_coords(self, a: int, u: int, b: int, v: int) -> list[Fraction]:
        raise NotImplementedError

    def restrict(self, F: Polynomial):
        raise NotImplementedError

    def evaluate_basis(self, m: int, point) -> np.ndarray:
        """Values of the degree-``m`` basis elements at an ambient point."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    @property
    def ambient_dim(self) -> int:
        return self.nvars - 1

    # shared machinery
    def mult_table(self, a: int, b: int) -> list[list[list[Fraction]]]:
        """Exact coordinates of products of basis elements of ``R_a`` and ``R_b``."""
        if a > b:
            t = self.mult_table(b, a)
            return [[t[v][u] for v in range(len(t))] for u in range(len(t[0]) if t else 0)]
        key = (a, b)
        with self._lock:
            if key not in self._tables:
                pa, pb = self.hilbert_function(a), self.hilbert_function(b)
                table = [[None] * pb for _ in range(pa)]
                for u in range(pa):
                    for v in range(pb):
                        if a == b and v < u:
                            table[u][v] = table[v][u]
                        else:
                            table[u][v] = self._product_coords(a, u, b, v)
                self._tables[key] = table
            return self._tables[key]

    def mult_tensor(self, a: int, b: int) -> np.ndarray:
        """Float tensor ``T[u, v, w]``: coordinate ``w`` of ``b_u * b_v``."""
        key = (a, b)
        with self._lock:
            if key not in self._tensors:
                table = self.mult_table(a, b)
                pa, pb, pc = self.hilbert_function(a), self.hilbert_function(b), self.hilbert_function(a + b)
                T = np.zeros((pa, pb, pc))
                for u in range(pa):
                    for v in range(pb):
                        T[u, v, :] = [float(c) for c in table[u][v]]
                T.setflags(write=False)
                self._tensors[key] = T
            return self._tensors[key]

    def multiply_to_coords(self, p, a: int, q, b: int):
        """Coordinates in ``R_{a+b}`` of the product of ``p in R_a`` and ``q in R_b``."""
        if len(p) != self.hilbert_function(a) or len(q) != self.hilbert_function(b):
            raise ValueError("coordinate vector length does not match the graded piece")
        if is_float_vec(p) or is_float_vec(q):
            T = self.mult_tensor(a, b)
            return np.einsum("u,v,uvw->w", to_float_vec(p), to_float_vec(q), T)
        table = self.mult_table(a, b)
        out = [Fraction(0)] * self.hilbert_function(a + b)
        for u, pu in enumerate(p):
            if not pu:
                continue
            for v, qv in enumerate(q):
                if not qv:
                    continue
                c = pu * qv
                for w, t in enumerate(table[u][v]):
                    if t:
                        out[w] += c * t
        return out

    def unit(self):
        return [Fraction(1)]

    def hilbert_sequence(self, upto: int) -> list[int]:
        return [self.hilbert_function(m) for m in range(upto + 1)]

    def contains_point(self, point, tol: float = 1e-9) -> bool:
        raise NotImplementedError

    def real_samples(self, count: int = 2000) -> np.ndarray:
        """Unit-norm representatives of real points of the curve (rows)."""
        raise NotImplementedError


# ---------------------------------------------------------------------------


class PlaneCurveModel(CurveModel):
    """Coordinate ring of a plane curve ``V(h)`` with a staircase basis."""

    kind = "plane"

    def __init__(self, h: Polynomial):
        super().__init__()
        if h.nvars != 3:
            raise ValueError("plane curve needs a ternary form")
        if h.mode != EXACT:
            raise ValueError("plane curve equation must have exact coefficients")
        if not h.is_homogeneous() or h.degree() < 2:
            raise ValueError("h must be homogeneous of degree >= 2")
        self.nvars = 3
        self.original = h
        self.d = h.degree()
        self.shift = 0
        lead = next((i for i in range(3) if h.coefficient(self._pure(i)) != 0), None)
        if lead is None:
            # unimodular change x0 <- x0 + lam*x1 until x0^d appears
            x = Polynomial.variables(3)
            lam = 1
            while True:
                hh = h.compose([x[0] + lam * x[1], x[1], x[2]])
                if hh.coefficient(self._pure(0)) != 0:
                    break
                lam += 1
            self.shift = lam
            h = hh
            lead = 0
        self.h = h
        self.lead = lead
        c = h.coefficient(self._pure(lead))
        # x_lead^d == sum(rule) modulo h
        self._rule = {e: -v / c for e, v in h.items() if e != self._pure(lead)}
        self._nf: dict[Monomial, dict[Monomial, Fraction]] = {}

    def _pure(self, i: int) -> Monomial:
        e = [0, 0, 0]
        e[i] = self.d
        return tuple(e)

    def _transform(self, F: Polynomial) -> Polynomial:
        if not self.shift:
            return F
        x = Polynomial.variables(3, F.mode)
        return F.compose([x[0] + self.shift * x[1], x[1], x[2]])

    def staircase(self, m: int) -> tuple[Monomial, ...]:
        return tuple(e for e in monomials(3, m) if e[self.lead] < self.d)

    def _stair_index(self, m: int) -> dict[Monomial, int]:
        return {e: i for i, e in enumerate(self.staircase(m))}

    def hilbert_function(self, m: int) -> int:
        if m < 0:
            return 0
        return binom(m + 2, 2) - binom(m - self.d + 2, 2)

    def hilbert_function_by_rank(self, m: int) -> int:
        """``dim S_m - rank(h * S_{m-d})`` by exact elimination."""
        if m < 0:
            return 0
        rows = []
        idx = monomial_index(3, m)
        for e in monomials(3, m - self.d):
            row = [Fraction(0)] * len(idx)
            for t, c in self.h.items():
                row[idx[tuple(a + b for a, b in zip(e, t))]] += c
            rows.append(row)
        return len(idx) - (exact_rank(rows) if rows else 0)

    def graded_basis(self, m: int) -> SubspaceBasis:
        idx = monomial_index(3, m)
        vecs = []
        for e in self.staircase(m):
            v = [Fraction(0)] * len(idx)
            v[idx[e]] = Fraction(1)
            vecs.append(tuple(v))
        return SubspaceBasis(len(idx), tuple(vecs))

    def basis_lifts(self, m: int) -> list[Polynomial]:
        return [Polynomial(3, {e: 1}) for e in self.staircase(m)]

    def normal_form(self, e: Monomial) -> dict[Monomial, Fraction]:
        """Remainder of a monomial modulo ``h`` (exact, memoized)."""
        e = tuple(e)
        with self._lock:
            if e in self._nf:
                return self._nf[e]
            if e[self.lead] < self.d:
                out = {e: Fraction(1)}
            else:
                base = list(e)
                base[self.lead] -= self.d
                out: dict[Monomial, Fraction] = {}
                for t, c in self._rule.items():
                    for s, v in self.normal_form(tuple(a + b for a, b in zip(base, t))).items():
                        out[s] = out.get(s, 0) + c * v
                out = {s: v for s, v in out.items() if v}
            self._nf[e] = out
            return out

    def restrict(self, F: Polynomial):
        if F.nvars != 3 or not F.is_homogeneous():
            raise ValueError("expected a homogeneous ternary form")
        F = self._transform(F)
        m = max(F.degree(), 0)
        index = self._stair_index(m)
        if F.mode == FLOAT:
            out = np.zeros(len(index))
            for e, c in F.items():
                for s, v in self.normal_form(e).items():
                    out[index[s]] += c * float(v)
            return out
        out = [Fraction(0)] * len(index)
        for e, c in F.items():
            for s, v in self.normal_form(e).items():
                out[index[s]] += c * v
        return out

    def _product_coords(self, a, u, b, v):
        ea, eb = self.staircase(a)[u], self.staircase(b)[v]
        index = self._stair_index(a + b)
        out = [Fraction(0)] * len(index)
        for s, c in self.normal_form(tuple(x + y for x, y in zip(ea, eb))).items():
            out[index[s]] += c
        return out

    def _to_model_coords(self, point):
        p = np.asarray(point)
        if self.shift:
            p = np.array([p[0] - self.shift * p[1], p[1], p[2]])
        return p

    def evaluate_basis(self, m, point):
        q = self._to_model_coords(point)
        return np.array([np.prod([q[i] ** e[i] for i in range(3)]) for e in self.staircase(m)])

    def equation_value(self, point) -> float:
        p = np.asarray(point, dtype=complex)
        scale = sum(abs(float(c)) for _, c in self.original.items()) * np.linalg.norm(p) ** self.d
        return abs(complex(self.original(list(p)))) / scale

    def contains_point(self, point, tol: float = 1e-9) -> bool:
        return self.equation_value(point) <= tol

    def real_samples(self, count: int = 2000, center=None) -> np.ndarray:
        """Real points found on a pencil of lines through a point off the curve."""
        hf = self.original.to_float()
        if center is None:
            for cand in ([0.0, 0.0, 1.0], [0.31, -0.17, 1.0], [1.0, 0.0, 0.0], [0.13, 1.0, 0.29]):
                if abs(hf(cand)) > 1e-6:
                    center = cand
                    break
        c = np.asarray(center, float)
        c /= np.linalg.norm(c)
        # orthonormal complement of c
        q, _ = np.linalg.qr(np.column_stack([c, np.eye(3)]))
        e1, e2 = q[:, 1], q[:, 2]
        pts = []
        nlines = max(count // max(self.d, 1), 16)
        t = Polynomial.variables(2, FLOAT)
        for th in np.linspace(0.0, math.pi, nlines, endpoint=False):
            w = math.cos(th) * e1 + math.sin(th) * e2
            line = [t[0] * float(c[i]) + t[1] * float(w[i]) for i in range(3)]
            g = hf.compose(line)
            # affine chart t1 = 1: polynomial in a = t0
            coeffs = [g.coefficient((k, self.d - k)) for k in range(self.d, -1, -1)]
            coeffs = np.array(coeffs, dtype=float)
            nz = np.flatnonzero(np.abs(coeffs) > 1e-14 * np.abs(coeffs).max())
            if nz.size == 0:
                continue
            roots = np.roots(coeffs[nz[0]:])
            for r in roots:
                if abs(r.imag) < 1e-7 * (1 + abs(r)):
                    p = r.real * c + w
                    pts.append(p / np.linalg.norm(p))
        return np.array(pts)

    def to_json(self) -> dict:
        return {"kind": "plane", "h": self.original.to_json()}


# ---------------------------------------------------------------------------


def _binary_vec(poly: Polynomial, degree: int) -> list:
    return poly.coords(degree) if not poly.is_zero() else [0] * (degree + 1)


def _univariate_gcd_degree(polys: Sequence[list[Fraction]]) -> int:
    """Degree of the gcd of dense univariate polynomials (highest coefficient first)."""

    def strip(p):
        i = 0
        while i < len(p) and p[i] == 0:
            i += 1
        return p[i:]

    def rem(a, b):
        a = list(a)
        while len(a) >= len(b) and a:
            f = a[0] / b[0]
            for i in range(len(b)):
                a[i] -= f * b[i]
            a = strip(a[1:]) if a[0] == 0 else strip(a)
        return a

    g: list[Fraction] = []
    for p in polys:
        p = strip([Fraction(c) for c in p])
        if not p:
            continue
        if not g:
            g = p
            continue
        a, b = g, p
        while b:
            a, b = b, rem(a, b)
        g = a
    return len(g) - 1 if g else -1


class ParamCurveModel(CurveModel):
    """Image of ``P^1`` under binary forms ``phi_0, ..., phi_n`` of common degree."""

    kind = "param"

    def __init__(self, forms: Sequence[Polynomial]):
        super().__init__()
        forms = list(forms)
        if len(forms) < 2:
            raise ValueError("need at least two forms")
        if any(f.nvars != 2 for f in forms):
            raise ValueError("parametrizing forms must be binary")
        modes = {f.mode for f in forms}
        self.mode = FLOAT if FLOAT in modes else EXACT
        if self.mode == FLOAT:
            forms = [f.to_float() for f in forms]
        degs = {f.degree() for f in forms if not f.is_zero()}
        if len(degs) != 1 or not all(f.is_homogeneous() for f in forms):
            raise ValueError("forms must be homogeneous of one common degree")
        self.forms = forms
        self.nvars = len(forms)
        self.d = degs.pop()
        if self.mode == EXACT:
            # no common root on P^1: no common factor x1 and coprime dehomogenizations
            if all(f.coefficient((0, self.d)) == 0 for f in forms) and all(
                    f.coefficient((self.d, 0)) == 0 for f in forms):
                raise ValueError("forms have a common root")
            at_inf = all(f.coefficient((self.d, 0)) == 0 for f in forms)
            g = _univariate_gcd_degree([_binary_vec(f, self.d) for f in forms])
            if at_inf or g > 0:
                raise ValueError("forms have a common root on P^1")
        self._pullbacks: dict = {}
        self._flint_forms: list = []
        self._bases: dict[int, tuple] = {}
        self.rank_gaps: dict[int, float] = {}

    def _pullback_exact(self, e: Monomial):
        """``prod phi_i^e_i`` dehomogenized at ``x1 = 1``, as a flint polynomial."""
        import flint

        if e not in self._pullbacks:
            k = next((i for i, v in enumerate(e) if v), None)
            if k is None:
                self._pullbacks[e] = flint.fmpq_poly([1])
            else:
                prev = list(e)
                prev[k] -= 1
                if not self._flint_forms:
                    for f in self.forms:
                        c = _binary_vec(f, self.d)
                        self._flint_forms.append(flint.fmpq_poly(
                            [flint.fmpq(Fraction(x).numerator, Fraction(x).denominator) for x in reversed(c)]))
                self._pullbacks[e] = self._pullback_exact(tuple(prev)) * self._flint_forms[k]
        return self._pullbacks[e]

    def _pullback_fmpq(self, e: Monomial) -> list:
        import flint

        n = self.d * sum(e)
        c = self._pullback_exact(tuple(e)).coeffs()
        c = c + [flint.fmpq(0)] * (n + 1 - len(c))
        return c[::-1]

    def pullback(self, e: Monomial) -> list:
        """Coefficient vector of ``prod phi_i^e_i`` as a binary form of degree ``d*|e|``."""
        e = tuple(e)
        with self._lock:
            if self.mode == EXACT:
                return [Fraction(int(x.p), int(x.q)) for x in self._pullback_fmpq(e)]
            if e not in self._pullbacks:
                k = next((i for i, v in enumerate(e) if v), None)
                if k is None:
                    self._pullbacks[e] = Polynomial.constant(2, 1, self.mode)
                else:
                    prev = list(e)
                    prev[k] -= 1
                    self.pullback(tuple(prev))
                    self._pullbacks[e] = self._pullbacks[tuple(prev)] * self.forms[k]
            return _binary_vec(self._pullbacks[e], self.d * sum(e))

    def pullback_poly(self, e: Monomial) -> Polynomial:
        return Polynomial.from_coords(2, self.d * sum(e), self.pullback(e), self.mode)

    def _basis(self, m: int):
        with self._lock:
            if m in self._bases:
                return self._bases[m]
            ncols = self.d * m + 1
            chosen: list[Monomial] = []
            rows = []
            if self.mode == EXACT:
                cand = monomials(self.nvars, m)
                with self._lock:
                    vecs = [self._pullback_fmpq(e) for e in cand]
                chosen = [cand[k] for k in exact_pivot_columns(vecs, ncols)]
                rows = [[Fraction(c) for c in self.pullback(e)] for e in chosen]
                data = (tuple(chosen), rows, None, _ExactSolver(rows))
            else:
                cand = monomials(self.nvars, m)
                mats = np.array([self.pullback(e) for e in cand], dtype=float)
                s = np.linalg.svd(mats, compute_uv=False) if mats.size else np.zeros(0)
                tol = FLOAT_RANK_RTOL * (s[0] if s.size else 0.0)
                rank = int(np.sum(s > tol))
                if 0 < rank < len(s):
                    self.rank_gaps[m] = float(s[rank - 1] / max(s[rank], 1e-300))
                current = np.zeros((0, ncols))
                for e, v in zip(cand, mats):
                    trial = np.vstack([current, v])
                    sv = np.linalg.svd(trial, compute_uv=False)
                    if np.sum(sv > FLOAT_RANK_RTOL * sv[0]) == len(trial):
                        current = trial
                        chosen.append(e)
                        if len(chosen) == rank:
                            break
                data = (tuple(chosen), current, None, np.linalg.pinv(current) if len(chosen) else None)
            self._bases[m] = data
            return data

    def basis_monomials(self, m: int) -> tuple[Monomial, ...]:
        return self._basis(m)[0]

    def basis_lifts(self, m: int) -> list[Polynomial]:
        return [Polynomial(self.nvars, {e: 1}) for e in self.basis_monomials(m)]

    def hilbert_function(self, m: int) -> int:
        if m < 0:
            return 0
        return len(self._basis(m)[0])

    def graded_basis(self, m: int) -> SubspaceBasis:
        chosen, rows, _, _ = self._basis(m)
        if self.mode == EXACT:
            return SubspaceBasis(self.d * m + 1, tuple(tuple(r) for r in rows))
        return SubspaceBasis(self.d * m + 1, tuple(tuple(Fraction(float(c)) for c in r) for r in rows))

    def form_coords(self, m: int, vec):
        """Coordinates in ``R_m`` of a binary form of degree ``d*m`` lying in ``V_m``."""
        chosen, rows, piv, inv = self._basis(m)
        if self.mode == EXACT and not is_float_vec(vec):
            return inv.solve(vec)
        B = np.array([[float(c) for c in r] for r in rows]) if self.mode == EXACT else rows
        v = to_float_vec(vec)
        if self.mode == EXACT:
            sol, *_ = np.linalg.lstsq(B.T, v, rcond=None)
        else:
            sol = v @ inv
        return np.asarray(sol, dtype=float)

    def restrict(self, F: Polynomial):
        if F.nvars != self.nvars or not F.is_homogeneous():
            raise ValueError("expected a homogeneous form in the ambient variables")
        m = max(F.degree(), 0)
        use_float = F.mode == FLOAT or self.mode == FLOAT
        total = np.zeros(self.d * m + 1) if use_float else [Fraction(0)] * (self.d * m + 1)
        for e, c in F.items():
            pb = self.pullback(e)
            if use_float:
                total = total + float(c) * to_float_vec(pb)
            else:
                for i, v in enumerate(pb):
                    if v:
                        total[i] += c * v
        return self.form_coords(m, total)

    def _product_coords(self, a, u, b, v):
        ea = self.basis_monomials(a)[u]
        eb = self.basis_monomials(b)[v]
        e = tuple(x + y for x, y in zip(ea, eb))
        c = self.form_coords(a + b, self.pullback(e))
        if isinstance(c, np.ndarray):
            return [Fraction(float(x)) for x in c]
        return c

    def evaluate_forms(self, param) -> np.ndarray:
        """Ambient point ``xi(param)`` for a homogeneous parameter ``(x0, x1)``."""
        return np.array([complex(f(list(param))) if np.iscomplexobj(param) else f(list(param))
                         for f in self.forms])

    def evaluate_basis(self, m, point):
        p = np.asarray(point)
        return np.array([np.prod([p[i] ** e[i] for i in range(self.nvars)]) for e in self.basis_monomials(m)])

    def contains_point(self, point, tol: float = 1e-9) -> bool:
        return self.point_residual(point) <= tol

    def point_residual(self, point) -> float:
        """Distance-like residual of ``point`` from the image of the parametrization."""
        p = np.asarray(point, dtype=complex)
        p = p / np.linalg.norm(p)
        # minors p_a*phi_b(s) - p_b*phi_a(s) as univariate polynomials in s = x0/x1
        F = [np.array([complex(c) for c in _binary_vec(f, self.d)]) for f in self.forms]
        rng = np.random.default_rng(7)
        w = rng.standard_normal((self.nvars, self.nvars))
        combo = np.zeros(self.d + 1, dtype=complex)
        for a in range(self.nvars):
            for b in range(a + 1, self.nvars):
                combo += w[a, b] * (p[a] * F[b] - p[b] * F[a])
        cands = []
        nz = np.flatnonzero(np.abs(combo) > 1e-14 * max(np.abs(combo).max(), 1e-300))
        if nz.size:
            cands = [np.array([r, 1.0]) for r in np.roots(combo[nz[0]:])]
        if nz.size == 0 or nz[0] > 0:
            cands.append(np.array([1.0, 0.0]))
        best = math.inf
        for s in cands:
            q = self.evaluate_forms(s.astype(complex))
            nq = np.linalg.norm(q)
            if nq == 0:
                continue
            q = q / nq
            M = np.outer(p, q) - np.outer(q, p)
            best = min(best, float(np.abs(M).max()))
        return best

    def real_samples(self, count: int = 2000) -> np.ndarray:
        pts = []
        for th in np.linspace(0.0, math.pi, count, endpoint=False):
            q = np.array([float(f([math.cos(th), math.sin(th)])) for f in self.forms])
            n = np.linalg.norm(q)
            if n > 0:
                pts.append(q / n)
        return np.array(pts)

    def ideal_generators(self, m: int) -> SubspaceBasis:
        """Degree-``m`` forms vanishing on the curve (kernel of the pullback)."""
        mons = monomials(self.nvars, m)
        cols = [self.pullback(e) for e in mons]
        if self.mode == FLOAT:
            raise ValueError("exact parametrization required")
        M = [[cols[j][r] for j in range(len(mons))] for r in range(self.d * m + 1)]
        _, ns = rank_and_nullspace(M)
        return ns

    def to_json(self) -> dict:
        return {"kind": "param", "forms": [f.to_json() for f in self.forms]}


def _fmpq_mat(rows: Sequence[Sequence], nrows: int, ncols: int):
    import flint

    flat = []
    for r in rows:
        for c in r:
            if isinstance(c, flint.fmpq):
                flat.append(c)
            else:
                q = Fraction(c)
                flat.append(flint.fmpq(q.numerator, q.denominator))
    return flint.fmpq_mat(nrows, ncols, flat)


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.p), int(x.q))


_PRIMES = (2147483647, 2147483629, 2147483587, 2147483579)


def exact_pivot_columns(vectors: Sequence[Sequence], dim: int) -> list[int]:
    """Indices of a maximal independent subset of exact vectors, greedy in input order.

    Each vector is scaled to integers and the echelon form is taken modulo
    large primes; the prime giving the largest rank wins. Vectors independent
    modulo a prime are independent over the rationals, so the selection is
    always a valid independent set. Maximality holds unless every prime
    divides all the relevant minors; downstream exact solves re-verify
    membership and raise if that ever happens.
    """
    import flint

    if not vectors:
        return []
    cols = []
    for v in vectors:
        qs = [c if isinstance(c, flint.fmpq) else flint.fmpq(Fraction(c).numerator, Fraction(c).denominator) for c in v]
        den = 1
        for q in qs:
            den = math.lcm(den, int(q.q))
        cols.append([int(q.p) * (den // int(q.q)) for q in qs])
    best = None
    for p in _PRIMES[:2]:
        R, rk = flint.nmod_mat([[cols[k][r] % p for k in range(len(cols))] for r in range(dim)], p).rref()
        if best is None or rk > best[1]:
            best = (R, rk)
    R, rk = best
    piv, k = [], 0
    for i in range(rk):
        while int(R[i, k]) == 0:
            k += 1
        piv.append(k)
    return piv


class _ExactSolver:
    """Coordinates of vectors in the row space of a fixed exact basis."""

    def __init__(self, rows: list[list[Fraction]]):
        self.rows = rows
        self.rank = len(rows)
        self._ready = False

    def _setup(self):
        rows = self.rows
        self._ready = True
        self.ncols = len(rows[0]) if rows else 0
        if not rows:
            self.piv, self.inv, self.basis = [], None, None
            return
        self.basis = _fmpq_mat(rows, self.rank, self.ncols)
        self.piv = exact_pivot_columns([[r[c] for r in rows] for c in range(self.ncols)], self.rank)
        rank = self.rank
        if len(self.piv) != rank:
            raise ArithmeticError("basis rows lost rank modulo the chosen primes")
        sub = _fmpq_mat([[r[c] for c in self.piv] for r in rows], rank, rank)
        self.inv = sub.inv()

    def solve(self, vec) -> list[Fraction]:
        if not self._ready:
            self._setup()
        if self.rank == 0:
            if any(Fraction(c) for c in vec):
                raise AssertionError("binary form does not lie in the graded piece")
            return []
        sel = _fmpq_mat([[vec[c] for c in self.piv]], 1, self.rank)
        out = sel * self.inv
        recon = out * self.basis
        target = _fmpq_mat([list(vec)], 1, self.ncols)
        if recon != target:
            raise AssertionError("binary form does not lie in the graded piece")
        return [_to_fraction(out[0, k]) for k in range(self.rank)]


# ---------------------------------------------------------------------------


class PolynomialRingModel(CurveModel):
    """The polynomial ring in ``n + 1`` variables (projective space ``P^n``)."""

    kind = "ring"

    def __init__(self, n: int):
        super().__init__()
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self.nvars = n + 1

    def hilbert_function(self, m: int) -> int:
        return binom(m + self.n, self.n) if m >= 0 else 0

    def graded_basis(self, m: int) -> SubspaceBasis:
        k = self.hilbert_function(m)
        return SubspaceBasis(k, tuple(tuple(Fraction(int(i == j)) for j in range(k)) for i in range(k)))

    def basis_lifts(self, m: int) -> list[Polynomial]:
        return [Polynomial(self.nvars, {e: 1}) for e in monomials(self.nvars, m)]

    def restrict(self, F: Polynomial):
        if F.nvars != self.nvars or not F.is_homogeneous():
            raise ValueError("expected a homogeneous form in the ambient variables")
        c = F.coords(max(F.degree(), 0))
        return np.array(c, dtype=float) if F.mode == FLOAT else c

    def _product_coords(self, a, u, b, v):
        e = tuple(x + y for x, y in zip(monomials(self.nvars, a)[u], monomials(self.nvars, b)[v]))
        out = [Fraction(0)] * self.hilbert_function(a + b)
        out[monomial_index(self.nvars, a + b)[e]] = Fraction(1)
        return out

    def evaluate_basis(self, m, point):
        p = np.asarray(point)
        return np.array([np.prod([p[i] ** e[i] for i in range(self.nvars)]) for e in monomials(self.nvars, m)])

    def contains_point(self, point, tol: float = 1e-9) -> bool:
        return bool(np.linalg.norm(point) > 0)

    def real_samples(self, count: int = 2000) -> np.ndarray:
        rng = np.random.default_rng(0)
        pts = rng.standard_normal((count, self.nvars))
        return pts / np.linalg.norm(pts, axis=1, keepdims=True)

    def to_json(self) -> dict:
        return {"kind": "ring", "n": self.n}


# ---------------------------------------------------------------------------
# fixtures


def deltoid_equation() -> Polynomial:
    x0, x1, x2 = Polynomial.variables(3)
    q = x0**2 + x1**2
    return (q**2 + 2 * x2**2 * q - Fraction(1, 3) * x2**4
            - Fraction(8, 3) * x2 * (x0**3 - 3 * x0 * x1**2))


def deltoid() -> PlaneCurveModel:
    return PlaneCurveModel(deltoid_equation())


def deltoid_point(t: float) -> np.ndarray:
    """Real point of the deltoid from its trigonometric parametrization."""
    return np.array([(2 * math.cos(t) + math.cos(2 * t)) / 3,
                     (2 * math.sin(t) - math.sin(2 * t)) / 3, 1.0])


def deltoid_cusps() -> list[np.ndarray]:
    return [deltoid_point(t) for t in (0.0, 2 * math.pi / 3, 4 * math.pi / 3)]


def quartic_triple_point() -> ParamCurveModel:
    s, t = Polynomial.variables(2)
    return ParamCurveModel([s**2 * t * (s - t), s * t**2 * (s - t), s**4 + t**4])


def p2() -> PolynomialRingModel:
    return PolynomialRingModel(2)


def binary_line() -> ParamCurveModel:
    """``P^1`` itself, parametrized by the identity; ``R_m`` = binary forms of degree m."""
    s, t = Polynomial.variables(2)
    return ParamCurveModel([s, t])


def plane_model(h: Polynomial) -> PlaneCurveModel:
    return PlaneCurveModel(h)


BUILTIN_CURVES = {
    "deltoid": deltoid,
    "quartic-triple-point": quartic_triple_point,
    "p2": p2,
}


def curve_from_json(data: dict) -> CurveModel:
    kind = data.get("kind")
    if kind == "plane":
        return PlaneCurveModel(Polynomial.from_json(data["h"]))
    if kind == "param":
        return ParamCurveModel([Polynomial.from_json(f) for f in data["forms"]])
    if kind == "ring":
        return PolynomialRingModel(int(data["n"]))
    raise ValueError(f"unknown curve kind {kind!r}")


def stabilization_index(model: CurveModel, max_m: int) -> int:
    """First ``m`` after which three consecutive first differences of HF agree."""
    hf = [model.hilbert_function(m) for m in range(4)]
    m = 3
    while True:
        diffs = [hf[i + 1] - hf[i] for i in range(m - 3, m)]
        if diffs[0] == diffs[1] == diffs[2]:
            return m - 3
        m += 1
        if m > max_m:
            raise RuntimeError(f"Hilbert function did not stabilize by degree {max_m}")
        hf.append(model.hilbert_function(m))
