"""Polynomials over exact rationals or floats, and the dense linear algebra
kernels used by the rest of the package.

Monomials are exponent tuples. Within a graded piece they are listed in
graded lexicographic order with ``x0 > x1 > ...``, so the first monomial of
degree ``m`` is ``x0**m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

Monomial = tuple[int, ...]

EXACT = "exact"
FLOAT = "float"


class ModeMismatch(TypeError):
    """Raised when exact and floating point polynomials are combined."""


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> tuple[Monomial, ...]:
    """All monomials of a given degree in graded lex order (x0 largest)."""
    if degree < 0:
        return ()
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        exp = [0] * nvars
        for v in combo:
            exp[v] += 1
        out.append(tuple(exp))
    out.sort(reverse=True)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(nvars: int, degree: int) -> dict[Monomial, int]:
    return {m: i for i, m in enumerate(monomials(nvars, degree))}


def binom(n: int, k: int) -> int:
    """Binomial coefficient that is zero whenever ``n < k`` (including n < 0)."""
    if k < 0 or n < k:
        return 0
    return math.comb(n, k)


def _as_coef(c, mode: str):
    if mode == EXACT:
        if isinstance(c, float):
            raise ModeMismatch("float coefficient in exact polynomial")
        return Fraction(c)
    return float(c)


def _parse_rational(s) -> Fraction:
    if isinstance(s, str):
        return Fraction(s.strip())
    if isinstance(s, int):
        return Fraction(s)
    raise ValueError(f"expected rational string, got {s!r}")


class Polynomial:
    """Sparse polynomial in a fixed number of variables.

    Coefficients are either all :class:`fractions.Fraction` (``mode="exact"``)
    or all ``float`` (``mode="float"``). Zero coefficients are never stored.
    Instances are treated as immutable.
    """

    __slots__ = ("nvars", "mode", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Monomial, object] | None = None, mode: str = EXACT):
        if mode not in (EXACT, FLOAT):
            raise ValueError(f"unknown coefficient mode {mode!r}")
        self.nvars = nvars
        self.mode = mode
        clean: dict[Monomial, object] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent {exp} for {nvars} variables")
            c = _as_coef(c, mode)
            if c != 0:
                clean[exp] = clean.get(exp, 0) + c
                if clean[exp] == 0:
                    del clean[exp]
        self._terms = clean
        self._hash = None

    # construction helpers
    @classmethod
    def constant(cls, nvars: int, c=1, mode: str = EXACT) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c}, mode)

    @classmethod
    def variable(cls, nvars: int, i: int, mode: str = EXACT) -> "Polynomial":
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, {tuple(exp): 1}, mode)

    @classmethod
    def variables(cls, nvars: int, mode: str = EXACT) -> list["Polynomial"]:
        return [cls.variable(nvars, i, mode) for i in range(nvars)]

    @classmethod
    def from_coords(cls, nvars: int, degree: int, coords: Sequence, mode: str | None = None) -> "Polynomial":
        """Polynomial from a coefficient vector over ``monomials(nvars, degree)``."""
        mons = monomials(nvars, degree)
        if len(coords) != len(mons):
            raise ValueError("coordinate vector has wrong length")
        if mode is None:
            mode = FLOAT if any(isinstance(c, (float, np.floating)) for c in coords) else EXACT
        return cls(nvars, {m: c for m, c in zip(mons, coords) if c != 0}, mode)

    # basic properties
    @property
    def terms(self) -> dict[Monomial, object]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, exp: Monomial):
        return self._terms.get(tuple(exp), Fraction(0) if self.mode == EXACT else 0.0)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    def coords(self, degree: int | None = None) -> list:
        """Coefficient vector over the graded lex monomials of ``degree``."""
        if degree is None:
            degree = max(self.degree(), 0)
        if not self.is_homogeneous() or (self._terms and self.degree() != degree):
            raise ValueError("polynomial is not homogeneous of the requested degree")
        zero = Fraction(0) if self.mode == EXACT else 0.0
        return [self._terms.get(m, zero) for m in monomials(self.nvars, degree)]

    def to_float(self) -> "Polynomial":
        if self.mode == FLOAT:
            return self
        return Polynomial(self.nvars, {e: float(c) for e, c in self._terms.items()}, FLOAT)

    # arithmetic
    def _check(self, other: "Polynomial"):
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        if self.mode != other.mode:
            raise ModeMismatch(f"cannot combine {self.mode} and {other.mode} polynomials")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (Rational, float, np.floating)):
            if isinstance(other, (float, np.floating)) and self.mode == EXACT:
                raise ModeMismatch("float scalar with exact polynomial")
            return Polynomial.constant(self.nvars, other, self.mode)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        self._check(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return Polynomial(self.nvars, out, self.mode)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self._terms.items()}, self.mode)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (Rational, float, np.floating)):
            if isinstance(other, (float, np.floating)) and self.mode == EXACT:
                raise ModeMismatch("float scalar with exact polynomial")
            c = _as_coef(other, self.mode)
            return Polynomial(self.nvars, {e: v * c for e, v in self._terms.items()}, self.mode)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return poly_mul(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.nvars, 1, self.mode)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.mode == other.mode and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, self.mode, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for e in sorted(self._terms, reverse=True):
            mono = "*".join(f"x{i}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            parts.append(f"({self._terms[e]})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    # evaluation and calculus
    def __call__(self, point: Sequence):
        """Evaluate at a point (numbers of any numeric type, incl. complex)."""
        if len(point) != self.nvars:
            raise ValueError("point has wrong dimension")
        total = 0
        for e, c in self._terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * x**k
            total = total + term
        return total

    def derivative(self, i: int) -> "Polynomial":
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return Polynomial(self.nvars, out, self.mode)

    def gradient(self, point: Sequence) -> list:
        return [self.derivative(i)(point) for i in range(self.nvars)]

    def compose(self, subs: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute ``subs[i]`` for ``x_i``."""
        if len(subs) != self.nvars:
            raise ValueError("need one substitution per variable")
        mode = EXACT if self.mode == EXACT and all(s.mode == EXACT for s in subs) else FLOAT
        src = self if mode == EXACT else self.to_float()
        subs = [s if mode == EXACT else s.to_float() for s in subs]
        target = subs[0]
        out = Polynomial(target.nvars, {}, mode)
        powers: dict[tuple[int, int], Polynomial] = {}

        def pw(i, k):
            if (i, k) not in powers:
                powers[(i, k)] = subs[i] ** k
            return powers[(i, k)]

        for e, c in src._terms.items():
            term = Polynomial.constant(target.nvars, c, mode)
            for i, k in enumerate(e):
                if k:
                    term = term * pw(i, k)
            out = out + term
        return out

    # serialization
    def to_json(self) -> dict:
        terms = []
        for e in sorted(self._terms, reverse=True):
            c = self._terms[e]
            terms.append({"exp": list(e), "coef": str(c) if self.mode == EXACT else float(c)})
        return {"vars": self.nvars, "terms": terms}

    @classmethod
    def from_json(cls, data: Mapping) -> "Polynomial":
        nvars = int(data["vars"])
        raw = data.get("terms", [])
        is_float = any(isinstance(t["coef"], float) for t in raw)
        mode = FLOAT if is_float else EXACT
        terms: dict[Monomial, object] = {}
        for t in raw:
            exp = tuple(int(e) for e in t["exp"])
            c = float(t["coef"]) if is_float else _parse_rational(t["coef"])
            terms[exp] = terms.get(exp, 0) + c
        return cls(nvars, terms, mode)


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    """Product of two polynomials with matching variable count and mode."""
    p._check(q)
    out: dict[Monomial, object] = {}
    for e1, c1 in p._terms.items():
        for e2, c2 in q._terms.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return Polynomial(p.nvars, out, p.mode)


# ---------------------------------------------------------------------------
# exact linear algebra


@dataclass(frozen=True)
class SubspaceBasis:
    """Linearly independent exact vectors in a coordinate space."""

    ambient_dim: int
    vectors: tuple[tuple[Fraction, ...], ...]

    def __len__(self):
        return len(self.vectors)

    def as_array(self) -> np.ndarray:
        if not self.vectors:
            return np.zeros((0, self.ambient_dim))
        return np.array([[float(c) for c in v] for v in self.vectors])


def _integer_rows(M: Sequence[Sequence]) -> list[list[int]]:
    rows = []
    for row in M:
        fr = [Fraction(c) for c in row]
        den = 1
        for c in fr:
            den = den * c.denominator // math.gcd(den, c.denominator)
        rows.append([int(c * den) for c in fr])
    return rows


def bareiss_echelon(rows: list[list[int]]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form of an integer matrix.

    Returns the nonzero echelon rows and their pivot columns. All
    intermediate divisions are exact.
    """
    rows = [list(r) for r in rows]
    m = len(rows)
    n = len(rows[0]) if rows else 0
    prev = 1
    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        pr = rows[r]
        for i in range(r + 1, m):
            ri = rows[i]
            a = ri[c]
            for k in range(c + 1, n):
                ri[k] = (ri[k] * piv - a * pr[k]) // prev
            ri[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def exact_rank(M: Sequence[Sequence]) -> int:
    if not M or not len(M[0]):
        return 0
    _, piv = bareiss_echelon(_integer_rows(M))
    return len(piv)


def rank_and_nullspace(M: Sequence[Sequence]) -> tuple[int, SubspaceBasis]:
    """Exact rank and a basis of the right nullspace of a rational matrix."""
    M = [list(r) for r in M]
    ncols = len(M[0]) if M else 0
    if not M or ncols == 0:
        return 0, SubspaceBasis(ncols, tuple(
            tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)))
    ech, pivots = bareiss_echelon(_integer_rows(M))
    free = [c for c in range(ncols) if c not in set(pivots)]
    vectors = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for row, pc in reversed(list(zip(ech, pivots))):
            s = sum((row[k] * v[k] for k in range(pc + 1, ncols) if row[k]), Fraction(0))
            v[pc] = -s / row[pc]
        vectors.append(tuple(v))
    return len(pivots), SubspaceBasis(ncols, tuple(vectors))


class IncrementalEchelon:
    """Exact row space grown one vector at a time (greedy independent subset)."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: list[list[Fraction]] = []
        self.pivots: list[int] = []

    def reduce(self, v: Sequence) -> list[Fraction]:
        w = [Fraction(c) for c in v]
        for row, pc in zip(self.rows, self.pivots):
            a = w[pc]
            if a:
                for k in range(pc, self.ncols):
                    if row[k]:
                        w[k] -= a * row[k]
        return w

    def add(self, v: Sequence) -> bool:
        """Add ``v`` if independent of the current rows; report whether it was."""
        w = self.reduce(v)
        pc = next((k for k, c in enumerate(w) if c), None)
        if pc is None:
            return False
        inv = 1 / w[pc]
        w = [c * inv for c in w]
        # keep rows fully reduced on pivot columns
        for row in self.rows:
            a = row[pc]
            if a:
                for k in range(self.ncols):
                    if w[k]:
                        row[k] -= a * w[k]
        self.rows.append(w)
        self.pivots.append(pc)
        return True

    def __len__(self):
        return len(self.rows)


def solve_exact(basis_rows: Sequence[Sequence[Fraction]], target: Sequence) -> list[Fraction] | None:
    """Coefficients ``c`` with ``sum c_i basis_rows[i] == target`` or None."""
    k = len(basis_rows)
    n = len(target)
    # columns of the augmented system are the basis vectors
    aug = [[Fraction(basis_rows[i][r]) for i in range(k)] + [Fraction(target[r])] for r in range(n)]
    ech = IncrementalEchelon(k + 1)
    for row in aug:
        ech.add(row)
    if k in ech.pivots:
        return None
    sol = [Fraction(0)] * k
    for row, pc in zip(ech.rows, ech.pivots):
        sol[pc] = row[k]
    return sol


# ---------------------------------------------------------------------------
# floating point kernels


def as_sym(M) -> np.ndarray:
    """Validate a dense symmetric float matrix."""
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if not np.array_equal(A, A.T):
        raise ValueError("matrix is not symmetric")
    return A


def symmetrize(M) -> np.ndarray:
    A = np.asarray(M, dtype=float)
    return (A + A.T) / 2


def sym_eig(M) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and matching orthonormal eigenvectors."""
    A = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    w, V = np.linalg.eigh(symmetrize(A))
    order = np.argsort(w)[::-1]
    return w[order], V[:, order]


def min_eig(M) -> float:
    A = np.asarray(M, dtype=float)
    if A.size == 0:
        return math.inf
    return float(np.linalg.eigvalsh(symmetrize(A))[0])


def max_eig(M) -> float:
    A = np.asarray(M, dtype=float)
    if A.size == 0:
        return -math.inf
    return float(np.linalg.eigvalsh(symmetrize(A))[-1])


def exact_is_psd(M: Sequence[Sequence[Fraction]]) -> bool:
    """Exact positive semidefiniteness test by symmetric pivoting (LDL^T)."""
    A = [[Fraction(c) for c in row] for row in M]
    n = len(A)
    if any(A[i][j] != A[j][i] for i in range(n) for j in range(n)):
        return False
    active = list(range(n))
    while active:
        i = active[0]
        piv = A[i][i]
        if piv < 0:
            return False
        if piv == 0:
            if any(A[i][k] != 0 for k in active):
                return False
            active.pop(0)
            continue
        rest = active[1:]
        for a in rest:
            f = A[a][i] / piv
            if f:
                for b in rest:
                    A[a][b] -= f * A[i][b]
        active = rest
    return True


def vector_to_json(v: Iterable) -> list:
    out = []
    for c in v:
        if isinstance(c, Fraction):
            out.append(str(c))
        else:
            out.append(float(c))
    return out


def vector_from_json(data: Sequence) -> list:
    if any(isinstance(c, float) for c in data):
        return [float(c) for c in data]
    return [_parse_rational(c) for c in data]
