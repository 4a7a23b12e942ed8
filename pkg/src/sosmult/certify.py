"""Multiplier search: certificates ``f * g`` SOS, or functionals proving none exist.

For fixed degrees ``(j, k)`` the question "is there a nonzero sum of squares
``g`` of degree ``2k`` with ``f g`` a sum of squares" is an SDP feasibility
problem with two Gram blocks. Every answer returned by :func:`certify_multiplier`
has been re-checked by :func:`verify_certificate` or :func:`verify_separator`,
which only use eigenvalues and the ring multiplication tables.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .algebra import max_eig, min_eig, symmetrize
from .curves import CurveModel, to_float_vec
from .sdp import (
    SEPARATOR_DELTA,
    Constraint,
    Feasible,
    Indeterminate,
    MomentFunctional,
    SdpProblem,
    Separator,
    SolverOptions,
    catalecticant,
    localized_catalecticant,
    localized_tensor,
    solve_feasibility,
)

CERT_TOL = 1e-6


@dataclass
class MultiplierCertificate:
    j: int
    k: int
    gram_A: np.ndarray
    gram_B: np.ndarray
    residual: float
    eig_margins: tuple[float, float]

    def to_json(self) -> dict:
        return {
            "kind": "certificate",
            "j": self.j,
            "k": self.k,
            "gram_A": self.gram_A.tolist(),
            "gram_B": self.gram_B.tolist(),
            "residual": self.residual,
            "eig_margins": list(self.eig_margins),
        }

    @classmethod
    def from_json(cls, data: dict) -> "MultiplierCertificate":
        return cls(int(data["j"]), int(data["k"]), np.array(data["gram_A"], float),
                   np.array(data["gram_B"], float), float(data["residual"]),
                   tuple(data["eig_margins"]))


@dataclass
class StrictSeparator:
    j: int
    k: int
    ell: MomentFunctional
    margin: float

    def to_json(self) -> dict:
        return {"kind": "separator", "j": self.j, "k": self.k, "degree": self.ell.degree,
                "ell": self.ell.coords.tolist(), "margin": self.margin}

    @classmethod
    def from_json(cls, model: CurveModel, data: dict) -> "StrictSeparator":
        ell = MomentFunctional(model, int(data["degree"]), np.array(data["ell"], float))
        return cls(int(data["j"]), int(data["k"]), ell, float(data["margin"]))


@dataclass
class CertifyOutcome:
    """One row of a multiplier search: the verified result plus timing and diagnostics."""

    k: int
    result: MultiplierCertificate | StrictSeparator | Indeterminate
    seconds: float
    diagnostic: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        if isinstance(self.result, MultiplierCertificate):
            return "certificate"
        if isinstance(self.result, StrictSeparator):
            return "separator"
        return "indeterminate"


def _check_f(model: CurveModel, f, j: int) -> np.ndarray:
    fv = to_float_vec(f)
    if fv.shape != (model.hilbert_function(2 * j),):
        raise ValueError(f"f must have {model.hilbert_function(2 * j)} coordinates in R_{2 * j}")
    if not np.any(np.abs(fv) > 0):
        raise ValueError("f is zero in the coordinate ring")
    return fv


def build_multiplier_problem(model: CurveModel, f, j: int, k: int) -> SdpProblem:
    """Blocks ``A`` (order HF(k)) and ``B`` (order HF(j+k)) with ``f*A == B`` and ``tr A = 1``.

    ``f`` is scaled to unit max-norm first; the scale is undone by
    :func:`certify_multiplier`.
    """
    if j < 0 or k < 0:
        raise ValueError("degrees must be nonnegative")
    fv = _check_f(model, f, j)
    fv = fv / np.max(np.abs(fv))
    p = model.hilbert_function(k)
    q = model.hilbert_function(j + k)
    L = localized_tensor(model, fv, 2 * j, k)
    T = model.mult_tensor(j + k, j + k)
    N = T.shape[2]
    constraints = []
    # row r: sum_u<=v B_uv coord_r(c_u c_v) - sum_a<=b A_ab coord_r(f b_a b_b) = 0
    for r in range(N):
        coeffs = {}
        for u in range(q):
            for v in range(u, q):
                c = T[u, v, r] * (1.0 if u == v else 2.0)
                if c != 0.0:
                    coeffs[(1, u, v)] = c
        for a in range(p):
            for b in range(a, p):
                c = L[a, b, r] * (1.0 if a == b else 2.0)
                if abs(c) > 1e-15:
                    coeffs[(0, a, b)] = -c
        constraints.append(Constraint(coeffs, 0.0))
    constraints.append(Constraint({(0, a, a): 1.0 for a in range(p)}, 1.0))
    return SdpProblem([p, q], constraints, normalization=len(constraints) - 1)


def _residual(model: CurveModel, fv: np.ndarray, j: int, k: int, A, B) -> tuple[float, float]:
    fA = np.einsum("ab,abr->r", A, localized_tensor(model, fv, 2 * j, k))
    sB = np.einsum("uv,uvr->r", B, model.mult_tensor(j + k, j + k))
    return float(np.max(np.abs(fA - sB))), float(np.max(np.abs(fA)))


def verify_certificate(model: CurveModel, f, cert: MultiplierCertificate, tol: float = CERT_TOL,
                       reasons: list | None = None) -> bool:
    """Independent check that ``A, B`` are PSD, ``tr A = 1`` and ``f*A`` reduces to ``B``."""
    reasons = reasons if reasons is not None else []
    try:
        fv = _check_f(model, f, cert.j)
        A = np.asarray(cert.gram_A, float)
        B = np.asarray(cert.gram_B, float)
        p, q = model.hilbert_function(cert.k), model.hilbert_function(cert.j + cert.k)
        if A.shape != (p, p) or B.shape != (q, q):
            reasons.append("gram matrix shapes do not match the graded pieces")
            return False
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
            reasons.append("non-finite gram entries")
            return False
        A, B = symmetrize(A), symmetrize(B)
        ok = True
        ea, eb = min_eig(A), min_eig(B)
        if ea < -tol:
            reasons.append(f"min eig A = {ea:.3e}")
            ok = False
        if eb < -tol:
            reasons.append(f"min eig B = {eb:.3e}")
            ok = False
        if abs(np.trace(A) - 1.0) > tol:
            reasons.append(f"trace A = {np.trace(A):.12g}")
            ok = False
        res, scale = _residual(model, fv, cert.j, cert.k, A, B)
        if res > tol * (1.0 + scale):
            reasons.append(f"residual {res:.3e} exceeds {tol * (1.0 + scale):.3e}")
            ok = False
        return ok
    except (ValueError, np.linalg.LinAlgError) as exc:
        reasons.append(str(exc))
        return False


def verify_separator(model: CurveModel, f, sep: StrictSeparator, delta: float = SEPARATOR_DELTA,
                     reasons: list | None = None) -> bool:
    """Check ``Cat(ell) >= delta`` and ``Loc_f(ell) <= -delta`` after normalizing ``ell``."""
    reasons = reasons if reasons is not None else []
    try:
        _check_f(model, f, sep.j)
        if sep.ell.degree != 2 * (sep.j + sep.k):
            reasons.append("functional degree does not match j + k")
            return False
        ell = sep.ell.normalized()
        lo = min_eig(catalecticant(model, ell, sep.j + sep.k))
        hi = max_eig(localized_catalecticant(model, ell, f, sep.k))
    except (ValueError, np.linalg.LinAlgError, FloatingPointError) as exc:
        reasons.append(str(exc))
        return False
    ok = True
    if lo < delta:
        reasons.append(f"catalecticant min eig {lo:.3e} < {delta:.1e}")
        ok = False
    if hi > -delta:
        reasons.append(f"localized catalecticant max eig {hi:.3e} > {-delta:.1e}")
        ok = False
    return ok


def separator_margin(model: CurveModel, f, sep: StrictSeparator) -> float:
    ell = sep.ell.normalized()
    lo = min_eig(catalecticant(model, ell, sep.j + sep.k))
    hi = max_eig(localized_catalecticant(model, ell, f, sep.k))
    return min(lo, -hi)


def find_certificate(model: CurveModel, f, j: int, k: int, opts: SolverOptions | None = None,
                     tol: float = CERT_TOL):
    """Solve only the primal side; return a verified certificate or ``None``."""
    out = solve_feasibility(build_multiplier_problem(model, f, j, k), opts)
    if isinstance(out, Feasible):
        cert = _certificate_from(model, f, j, k, out)
        if verify_certificate(model, f, cert, tol):
            return cert
    return None


def _certificate_from(model, f, j, k, out: Feasible) -> MultiplierCertificate:
    fv = to_float_vec(f)
    scale = float(np.max(np.abs(fv)))
    A = symmetrize(out.blocks[0])
    B = symmetrize(out.blocks[1]) * scale
    res, _ = _residual(model, fv, j, k, A, B)
    return MultiplierCertificate(j, k, A, B, res, (min_eig(A), min_eig(B)))


def _separator_from(model, f, j, k, out: Separator) -> StrictSeparator:
    N = model.hilbert_function(2 * j + 2 * k)
    ell = MomentFunctional(model, 2 * j + 2 * k, out.dual[:N]).normalized()
    sep = StrictSeparator(j, k, ell, 0.0)
    sep.margin = separator_margin(model, f, sep)
    return sep


def find_separator(model: CurveModel, f, j: int, k: int, opts: SolverOptions | None = None,
                   delta: float = SEPARATOR_DELTA):
    """Solve only the dual side; return a verified separator or ``None``."""
    from .sdp import _dual_stage

    P = build_multiplier_problem(model, f, j, k)
    P.validate()
    dual = _dual_stage(P, opts or SolverOptions())
    if "dual" not in dual:
        return None
    sep = _separator_from(model, f, j, k, Separator(dual["dual"], dual["tau"]))
    return sep if verify_separator(model, f, sep, delta) else None


def certify_multiplier(model: CurveModel, f, j: int, k: int, opts: SolverOptions | None = None,
                       delta: float = SEPARATOR_DELTA, tol: float = CERT_TOL):
    """Verified certificate, verified separator, or :class:`Indeterminate`."""
    P = build_multiplier_problem(model, f, j, k)
    out = solve_feasibility(P, opts)
    if isinstance(out, Feasible):
        cert = _certificate_from(model, f, j, k, out)
        reasons: list = []
        if verify_certificate(model, f, cert, tol, reasons):
            return cert
        return Indeterminate({"stage": "certificate verification", "reasons": reasons})
    if isinstance(out, Separator):
        sep = _separator_from(model, f, j, k, out)
        reasons = []
        if verify_separator(model, f, sep, delta, reasons):
            return sep
        return Indeterminate({"stage": "separator verification", "margin": sep.margin, "reasons": reasons})
    return out


def search_min_multiplier_degree(model: CurveModel, f, j: int, k_max: int, opts: SolverOptions | None = None,
                                 exhaustive: bool = False, delta: float = SEPARATOR_DELTA,
                                 tol: float = CERT_TOL) -> list[CertifyOutcome]:
    """Outcomes for ``k = 0, 1, ...``; stops after the first certificate unless ``exhaustive``."""
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    table = []
    for k in range(k_max + 1):
        t0 = time.perf_counter()
        res = certify_multiplier(model, f, j, k, opts, delta, tol)
        row = CertifyOutcome(k, res, time.perf_counter() - t0)
        if isinstance(res, Indeterminate):
            row.diagnostic = res.diagnostic
        table.append(row)
        if isinstance(res, MultiplierCertificate) and not exhaustive:
            break
    return table


def sample_pos_interior(model: CurveModel, j: int, rng: np.random.Generator, chart: int = 2,
                        box: float = 3.0, min_gap: float = 0.2, samples: int = 4000):
    """Random strictly positive element of ``R_{2j}``: a product of ``j`` ball-distance quadrics.

    Each factor is ``|x - q x_c|^2 - rho^2 x_c^2`` for a random affine center
    ``q`` at distance ``> min_gap`` from every sampled real point and ``rho``
    half that distance, so it is positive on the real points of the curve.
    Returns ``(coords, lift)``.
    """
    from .harnack import distance_quadric

    if j < 1:
        raise ValueError("j must be at least 1")
    S = model.real_samples(samples)
    S = S[np.abs(S[:, chart]) > 1e-9]
    aff = S / S[:, [chart]]
    others = [l for l in range(model.nvars) if l != chart]
    lift = None
    for _ in range(j):
        for _attempt in range(1000):
            q = np.zeros(model.nvars)
            q[chart] = 1.0
            q[others] = rng.uniform(-box, box, len(others))
            gap = float(np.min(np.linalg.norm(aff - q, axis=1))) if len(aff) else box
            if gap > min_gap:
                break
        else:
            raise RuntimeError("no ball center found away from the curve")
        h = distance_quadric(q, (0.5 * gap) ** 2, chart, model.nvars)
        lift = h if lift is None else lift * h
    return model.restrict(lift), lift
