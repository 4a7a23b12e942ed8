"""Moment matrices, corank utilities and a dense two-phase SDP feasibility solver.

The feasibility solver decides problems of the form

    find X_1, ..., X_B  PSD  with  sum_i <C_{r,i}, X_i> = b_r  for all r

in two stages. The first maximizes the smallest eigenvalue ``t`` over all
blocks subject to the constraints; ``t >= -eps_feas`` yields a feasible
point. Otherwise the second stage searches for a dual vector ``y`` whose
adjoint matrices ``S_i(y) = sum_r y_r C_{r,i}`` are all positive definite
while ``b . y < 0``, with the largest common eigenvalue margin. Both stages
are interior-point solves with ``cvxopt``; nothing returned here is trusted
by callers without an independent eigenvalue check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import exact_is_psd, min_eig, sym_eig, symmetrize
from .curves import CurveModel, is_float_vec, to_float_vec

EPS_FEAS = 1e-8
SEPARATOR_DELTA = 1e-6
MAX_ITER = 200
EPS_GAP = 1e-10
PRIMAL_TRACE_PENALTY = 1e-4


class SdpError(ValueError):
    """Malformed SDP data (dimension mismatch, non-finite entries)."""


@dataclass
class MomentFunctional:
    """Linear functional on ``R_degree`` in coordinates dual to the graded basis."""

    model: CurveModel
    degree: int
    coords: np.ndarray

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        if self.coords.shape != (self.model.hilbert_function(self.degree),):
            raise ValueError("functional has wrong length for this graded piece")
        if not np.all(np.isfinite(self.coords)):
            raise ValueError("functional has non-finite entries")

    def __call__(self, element) -> float:
        return float(self.coords @ to_float_vec(element))

    def __add__(self, other: "MomentFunctional") -> "MomentFunctional":
        if other.model is not self.model or other.degree != self.degree:
            raise ValueError("functionals live on different spaces")
        return MomentFunctional(self.model, self.degree, self.coords + other.coords)

    def __mul__(self, c: float) -> "MomentFunctional":
        return MomentFunctional(self.model, self.degree, self.coords * float(c))

    __rmul__ = __mul__

    def normalized(self) -> "MomentFunctional":
        return MomentFunctional(self.model, self.degree, self.coords / np.linalg.norm(self.coords))

    @classmethod
    def point_evaluation(cls, model: CurveModel, degree: int, point, weight: float = 1.0) -> "MomentFunctional":
        """``weight * (evaluation at an ambient real point)``."""
        vals = np.real_if_close(model.evaluate_basis(degree, point))
        return cls(model, degree, weight * np.asarray(vals, dtype=float))


# ---------------------------------------------------------------------------


def catalecticant(model: CurveModel, ell: MomentFunctional, m: int) -> np.ndarray:
    """Moment matrix ``[ell(b_a b_b)]`` over the basis of ``R_m``."""
    if ell.degree != 2 * m:
        raise ValueError(f"functional has degree {ell.degree}, expected {2 * m}")
    T = model.mult_tensor(m, m)
    return symmetrize(np.einsum("abw,w->ab", T, ell.coords))


def localized_catalecticant(model: CurveModel, ell: MomentFunctional, f, k: int) -> np.ndarray:
    """Matrix ``[ell(f b_a b_b)]`` over the basis of ``R_k``; ``f`` lies in ``R_{ell.degree - 2k}``."""
    two_j = ell.degree - 2 * k
    if two_j < 0 or len(f) != model.hilbert_function(two_j):
        raise ValueError("functional degree does not match f and k")
    return symmetrize(np.einsum("abr,r->ab", localized_tensor(model, f, two_j, k), ell.coords))


def localized_tensor(model: CurveModel, f, two_j: int, k: int) -> np.ndarray:
    """``L[a, b, r]``: coordinate ``r`` of ``f * b_a * b_b`` with ``f`` in ``R_{two_j}``."""
    Tkk = model.mult_tensor(k, k)
    Tfk = model.mult_tensor(two_j, 2 * k)
    return np.einsum("u,abv,uvr->abr", to_float_vec(f), Tkk, Tfk)


def corank(M, tol: float = 1e-9) -> int:
    """Number of eigenvalues with ``|lambda| <= tol * (1 + max |lambda|)``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    w, _ = sym_eig(M)
    if w.size == 0:
        return 0
    scale = 1.0 + float(np.max(np.abs(w)))
    return int(np.sum(np.abs(w) <= tol * scale))


def facet_normal(M, tol: float = 1e-9) -> np.ndarray:
    """Unit kernel vector of a corank-one form, first nonzero entry positive."""
    c = corank(M, tol)
    if c != 1:
        raise ValueError(f"facet normal needs corank 1, got {c}")
    w, V = sym_eig(M)
    i = int(np.argmin(np.abs(w)))
    v = V[:, i] / np.linalg.norm(V[:, i])
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if v[nz[0]] < 0:
        v = -v
    return v


# ---------------------------------------------------------------------------
# generic feasibility problems


@dataclass
class Constraint:
    """``sum coeffs[(block, i, j)] * X_block[i, j] == rhs`` with ``i <= j``."""

    coeffs: dict[tuple[int, int, int], float]
    rhs: float


@dataclass
class SdpProblem:
    blocks: list[int]
    constraints: list[Constraint]
    normalization: int | None = None

    def validate(self):
        for con in self.constraints:
            if not math.isfinite(con.rhs):
                raise SdpError("non-finite right-hand side")
            for (blk, i, j), v in con.coeffs.items():
                if not (0 <= blk < len(self.blocks)):
                    raise SdpError(f"constraint references missing block {blk}")
                if not (0 <= i <= j < self.blocks[blk]):
                    raise SdpError(f"entry ({i},{j}) outside block {blk} or below the diagonal")
                if not math.isfinite(v):
                    raise SdpError("non-finite constraint coefficient")
        if self.normalization is not None and not (0 <= self.normalization < len(self.constraints)):
            raise SdpError("normalization index out of range")

    def adjoint(self, y: Sequence[float]) -> list[np.ndarray]:
        """Matrices ``S_i(y) = sum_r y_r C_{r,i}`` (symmetric embedding of coefficients)."""
        out = [np.zeros((p, p)) for p in self.blocks]
        for yr, con in zip(y, self.constraints):
            if yr == 0:
                continue
            for (blk, i, j), v in con.coeffs.items():
                if i == j:
                    out[blk][i, i] += yr * v
                else:
                    out[blk][i, j] += yr * v / 2
                    out[blk][j, i] += yr * v / 2
        return out

    def residual(self, X: Sequence[np.ndarray]) -> np.ndarray:
        res = []
        for con in self.constraints:
            s = sum(v * X[blk][i, j] for (blk, i, j), v in con.coeffs.items())
            res.append(s - con.rhs)
        return np.array(res)

    def to_json(self) -> dict:
        return {
            "blocks": list(self.blocks),
            "normalization": self.normalization,
            "constraints": [
                {"rhs": c.rhs, "coeffs": [[b, i, j, v] for (b, i, j), v in sorted(c.coeffs.items())]}
                for c in self.constraints
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SdpProblem":
        cons = [Constraint({(int(b), int(i), int(j)): float(v) for b, i, j, v in c["coeffs"]}, float(c["rhs"]))
                for c in data["constraints"]]
        return cls([int(b) for b in data["blocks"]], cons, data.get("normalization"))


@dataclass
class Feasible:
    blocks: list[np.ndarray]
    residual: float
    min_eig: float


@dataclass
class Separator:
    dual: np.ndarray
    margin: float


@dataclass
class Indeterminate:
    diagnostic: dict = field(default_factory=dict)


SdpOutcome = Feasible | Separator | Indeterminate


@dataclass
class SolverOptions:
    eps_feas: float = EPS_FEAS
    eps_gap: float = EPS_GAP
    max_iter: int = MAX_ITER

    def __post_init__(self):
        if self.eps_feas <= 0 or self.eps_gap <= 0 or self.max_iter <= 0:
            raise ValueError("solver tolerances and iteration cap must be positive")


def _vech_index(p: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(p) for j in range(i, p)]


def _cvx_lmi(c, lmis, A=None, b=None, Gl=None, hl=None, opts: SolverOptions | None = None):
    """Minimize ``c.x`` s.t. ``F0 + sum x_k F_k >= 0`` for each LMI, ``A x = b``, ``Gl x <= hl``."""
    from cvxopt import matrix, solvers

    opts = opts or SolverOptions()
    n = len(c)
    Gs, hs = [], []
    for F0, Fk in lmis:
        p = F0.shape[0]
        G = np.zeros((p * p, n))
        for k, Fm in Fk.items():
            G[:, k] = -Fm.reshape(-1, order="F")
        Gs.append(matrix(G))
        hs.append(matrix(np.asarray(F0, float)))
    kw = {}
    if A is not None and len(A):
        kw["A"] = matrix(np.asarray(A, float))
        kw["b"] = matrix(np.asarray(b, float))
    if Gl is not None:
        Gl_m, hl_m = matrix(np.asarray(Gl, float)), matrix(np.asarray(hl, float))
    else:
        Gl_m, hl_m = None, None
    base = {"show_progress": False, "maxiters": int(opts.max_iter), "abstol": opts.eps_gap,
            "reltol": opts.eps_gap, "feastol": min(opts.eps_feas, 1e-9)}
    # the default KKT solver occasionally breaks down near degenerate optima;
    # fall back to LDL with iterative refinement, then to looser tolerances
    attempts = [({}, {}), ({"refinement": 3}, {"kktsolver": "ldl"}),
                ({"refinement": 3, "feastol": 1e-8, "abstol": 1e-8, "reltol": 1e-8}, {"kktsolver": "ldl"})]
    sol, errors = None, []
    for extra, kkt in attempts:
        try:
            sol = solvers.sdp(matrix(np.asarray(c, float)), Gl=Gl_m, hl=hl_m, Gs=Gs, hs=hs,
                              options={**base, **extra}, **kw, **kkt)
            break
        except (ValueError, ArithmeticError) as exc:
            errors.append(str(exc))
    if sol is None:
        return {"status": "error", "message": "; ".join(errors)}
    out = {"status": sol["status"], "iterations": sol.get("iterations")}
    if sol["x"] is not None:
        out["x"] = np.array(sol["x"]).ravel()
        out["y"] = np.array(sol["y"]).ravel() if sol["y"] is not None else None
    return out


def _independent_rows(A: np.ndarray, b: np.ndarray):
    """Drop linearly dependent equality rows; report inconsistency."""
    if A.shape[0] == 0:
        return A, b, True
    Q, R, P = _qr_pivot(A.T)
    diag = np.abs(np.diag(R)) if R.size else np.zeros(0)
    tol = 1e-10 * (diag[0] if diag.size else 1.0)
    rank = int(np.sum(diag > tol))
    keep = np.sort(P[:rank])
    A2, b2 = A[keep], b[keep]
    x, *_ = np.linalg.lstsq(A2, b2, rcond=None)
    consistent = np.linalg.norm(A @ x - b) <= 1e-8 * (1 + np.linalg.norm(b))
    return A2, b2, consistent


def _qr_pivot(M):
    from scipy.linalg import qr

    return qr(M, mode="economic", pivoting=True)


def _equality_matrix(P: SdpProblem, offsets: list[int], nvar: int) -> tuple[np.ndarray, np.ndarray]:
    A = np.zeros((len(P.constraints), nvar))
    b = np.zeros(len(P.constraints))
    index = [{ij: k for k, ij in enumerate(_vech_index(p))} for p in P.blocks]
    for r, con in enumerate(P.constraints):
        for (blk, i, j), v in con.coeffs.items():
            A[r, offsets[blk] + index[blk][(i, j)]] += v
        b[r] = con.rhs
    return A, b


def _primal_stage(P: SdpProblem, opts: SolverOptions):
    """Maximize the least eigenvalue over all blocks subject to the constraints."""
    sizes = [p * (p + 1) // 2 for p in P.blocks]
    offsets = list(np.cumsum([0] + sizes[:-1]))
    nx = sum(sizes)
    n = nx + 1  # last variable is t
    A, b = _equality_matrix(P, offsets, n)
    A, b, consistent = _independent_rows(A, b)
    if not consistent:
        return {"status": "inconsistent"}
    lmis = []
    for blk, p in enumerate(P.blocks):
        Fk = {}
        for k, (i, j) in enumerate(_vech_index(p)):
            E = np.zeros((p, p))
            E[i, j] = E[j, i] = 1.0
            Fk[offsets[blk] + k] = E
        Fk[nx] = -np.eye(p)
        lmis.append((np.zeros((p, p)), Fk))
    c = np.zeros(n)
    c[nx] = -1.0
    Gl = np.zeros((1, n))
    Gl[0, nx] = 1.0
    res = _cvx_lmi(c, lmis, A, b, Gl, np.array([1.0]), opts)
    if res.get("status") != "optimal":
        # with few constraints the optimal face (t = 1) is unbounded and the
        # central path diverges; a small trace penalty makes it compact
        mu = PRIMAL_TRACE_PENALTY / sum(P.blocks)
        for blk, p in enumerate(P.blocks):
            for k, (i, j) in enumerate(_vech_index(p)):
                if i == j:
                    c[offsets[blk] + k] = mu
        retry = _cvx_lmi(c, lmis, A, b, Gl, np.array([1.0]), opts)
        if "x" in retry:
            retry["first_status"] = res.get("status")
            res = retry
    if "x" in res:
        x = res["x"]
        X = []
        for blk, p in enumerate(P.blocks):
            M = np.zeros((p, p))
            for k, (i, j) in enumerate(_vech_index(p)):
                M[i, j] = M[j, i] = x[offsets[blk] + k]
            X.append(M)
        res["X"] = X
        res["t"] = float(x[nx])
    return res


def _dual_stage(P: SdpProblem, opts: SolverOptions):
    """Largest common margin ``tau`` with ``S_i(y) >= tau I`` and ``b.y <= -tau``."""
    m = len(P.constraints)
    n = m + 1  # last variable is tau
    basis = []
    for r in range(m):
        e = np.zeros(m)
        e[r] = 1.0
        basis.append(P.adjoint(e))
    lmis = []
    for blk, p in enumerate(P.blocks):
        Fk = {r: basis[r][blk] for r in range(m) if np.any(basis[r][blk])}
        Fk[m] = -np.eye(p)
        lmis.append((np.zeros((p, p)), Fk))
    # normalization: total trace of the adjoint matrices is one
    A = np.zeros((1, n))
    for r in range(m):
        A[0, r] = sum(np.trace(basis[r][blk]) for blk in range(len(P.blocks)))
    rhs = np.array([con.rhs for con in P.constraints])
    Gl = np.zeros((1, n))
    Gl[0, :m] = rhs
    Gl[0, m] = 1.0
    c = np.zeros(n)
    c[m] = -1.0
    res = _cvx_lmi(c, lmis, A, np.array([1.0]), Gl, np.array([0.0]), opts)
    if "x" in res:
        res["dual"] = res["x"][:m]
        res["tau"] = float(res["x"][m])
    return res


def solve_feasibility(P: SdpProblem, opts: SolverOptions | None = None) -> SdpOutcome:
    """Resolve a PSD feasibility problem into a feasible point, a separator, or neither."""
    opts = opts or SolverOptions()
    P.validate()
    primal = _primal_stage(P, opts)
    diag: dict = {"primal_status": primal.get("status")}
    if "t" in primal:
        X = primal["X"]
        t = primal["t"]
        res = float(np.max(np.abs(P.residual(X)))) if P.constraints else 0.0
        mine = min(min_eig(M) for M in X) if X else 0.0
        diag.update(primal_t=t, primal_residual=res, primal_min_eig=mine)
        if t >= -opts.eps_feas and mine >= -opts.eps_feas and res <= opts.eps_feas * 10:
            return Feasible(X, res, mine)
    dual = _dual_stage(P, opts)
    diag["dual_status"] = dual.get("status")
    if "tau" in dual:
        y = dual["dual"]
        S = P.adjoint(y)
        margin = min(min_eig(M) for M in S)
        by = float(np.dot([c.rhs for c in P.constraints], y))
        diag.update(dual_tau=dual["tau"], dual_margin=margin, dual_objective=by)
        if margin > opts.eps_feas and by < 0:
            return Separator(y, margin)
    return Indeterminate(diag)


# ---------------------------------------------------------------------------


def sos_constraint_rows(model: CurveModel, m: int) -> list[dict[tuple[int, int], float]]:
    """Per coordinate of ``R_{2m}``: coefficient of each Gram entry ``(u <= v)``."""
    T = model.mult_tensor(m, m)
    p, _, N = T.shape
    rows = [dict() for _ in range(N)]
    for u in range(p):
        for v in range(u, p):
            mult = 1.0 if u == v else 2.0
            for r in np.flatnonzero(T[u, v]):
                rows[r][(u, v)] = mult * T[u, v, r]
    return rows


def gram_to_element(model: CurveModel, G, m: int) -> np.ndarray:
    """Coordinates in ``R_{2m}`` of ``sum G_uv b_u b_v``."""
    return np.einsum("uv,uvw->w", np.asarray(G, float), model.mult_tensor(m, m))


@dataclass
class PointednessResult:
    pointed: bool | None
    witness: object
    margin: float
    residual: float | None = None
    exact: bool = False
    diagnostic: dict = field(default_factory=dict)


def _rationalize(G: np.ndarray, max_den: int = 10**6) -> list[list[Fraction]]:
    p = G.shape[0]
    R = [[Fraction(float(G[i, j])).limit_denominator(max_den) for j in range(p)] for i in range(p)]
    for i in range(p):
        for j in range(i):
            R[i][j] = R[j][i]
    return R


def check_pointed(model: CurveModel, j: int, delta: float = SEPARATOR_DELTA,
                  opts: SolverOptions | None = None) -> PointednessResult:
    """Decide whether the cone of sums of squares in ``R_{2j}`` is pointed.

    A positive definite moment matrix certifies pointedness; a nonzero PSD
    Gram matrix whose sum of squares vanishes in ``R_{2j}`` refutes it.
    """
    if j < 1:
        raise ValueError("j must be at least 1")
    opts = opts or SolverOptions()
    p = model.hilbert_function(j)
    N = model.hilbert_function(2 * j)
    T = model.mult_tensor(j, j)
    # maximize min eig of Cat(ell) subject to trace(Cat(ell)) = p
    lmi = (np.zeros((p, p)), {r: symmetrize(T[:, :, r]) for r in range(N)})
    lmi[1][N] = -np.eye(p)
    A = np.zeros((1, N + 1))
    A[0, :N] = [np.trace(T[:, :, r]) for r in range(N)]
    c = np.zeros(N + 1)
    c[N] = -1.0
    Gl = np.zeros((1, N + 1))
    Gl[0, N] = 1.0
    res = _cvx_lmi(c, [lmi], A, np.array([float(p)]), Gl, np.array([2.0]), opts)
    diag = {"search_status": res.get("status")}
    if "x" in res:
        ell = MomentFunctional(model, 2 * j, res["x"][:N])
        C = catalecticant(model, ell, j)
        lam = min_eig(C)
        diag["min_eig"] = lam
        if lam >= delta * np.trace(C) / p:
            return PointednessResult(True, ell, lam, diagnostic=diag)
    # search for a nontrivial sum of squares equal to zero
    rows = sos_constraint_rows(model, j)
    cons = [Constraint({(0, u, v): c for (u, v), c in row.items()}, 0.0) for row in rows]
    cons.append(Constraint({(0, u, u): 1.0 for u in range(p)}, 1.0))
    out = solve_feasibility(SdpProblem([p], cons, normalization=len(cons) - 1), opts)
    diag["zero_sos_search"] = type(out).__name__
    if isinstance(out, Feasible):
        G = out.blocks[0]
        resid = float(np.max(np.abs(gram_to_element(model, G, j))))
        R = _rationalize(G)
        exact = False
        if exact_is_psd(R) and any(R[i][i] for i in range(p)):
            table = model.mult_table(j, j)
            elem = [Fraction(0)] * N
            for u in range(p):
                for v in range(p):
                    if R[u][v]:
                        for w, t in enumerate(table[u][v]):
                            if t:
                                elem[w] += R[u][v] * t
            if not any(elem):
                exact = True
                top = max(abs(x) for row in R for x in row)
                R = [[x / top for x in row] for row in R]
                G = np.array([[float(x) for x in row] for row in R])
                resid = 0.0
        if resid <= 1e-9:
            return PointednessResult(False, R if exact else G, min_eig(G), resid, exact, diag)
    return PointednessResult(None, None, float("nan"), diagnostic=diag)


def outcome_to_json(out) -> dict:
    if isinstance(out, Feasible):
        return {"kind": "feasible", "residual": out.residual, "min_eig": out.min_eig,
                "blocks": [b.tolist() for b in out.blocks]}
    if isinstance(out, Separator):
        return {"kind": "separator", "margin": out.margin, "dual": out.dual.tolist()}
    return {"kind": "indeterminate", "diagnostic": json.loads(json.dumps(out.diagnostic, default=str))}
