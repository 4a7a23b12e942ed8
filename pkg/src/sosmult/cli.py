"""Command-line entry point: ``sosmult <subcommand> ...``.

JSON goes to stdout (or ``--json PATH``), a short human summary to stderr.
Exit codes: 64 for usage errors, 70 for failed computations; ``certify``
returns 0/2/3 for certificate/separator/indeterminate and
``separator-verify`` returns 0/1.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import Polynomial
from .bounds import (
    bound_report,
    ci_closed_forms,
    curve_invariants,
    multiplier_degree_bound_curve,
    p2_schedule_for_degree,
    surface_multiplier_schedule,
)
from .certify import (
    MultiplierCertificate,
    StrictSeparator,
    build_multiplier_problem,
    certify_multiplier,
    verify_separator,
    separator_margin,
)
from .curves import BUILTIN_CURVES, CurveModel, binary_line, curve_from_json
from .harnack import HarnackSpec, detect_nodes, harnack_parametrization
from .polygon import LatticePolygon, is_smooth, polygon_by_name, polygon_invariants, toric_curve_invariants
from .sdp import EPS_FEAS, EPS_GAP, MAX_ITER, SEPARATOR_DELTA, SolverOptions, check_pointed, outcome_to_json

EXIT_USAGE = 64
EXIT_SOFTWARE = 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not x > 0:
        raise argparse.ArgumentTypeError("tolerances must be positive")
    return x


def _positive_int(text: str) -> int:
    try:
        x = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if x <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _nonneg_int(text: str) -> int:
    x = int(text)
    if x < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return x


# ---------------------------------------------------------------------------
# input resolution


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise UsageError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def resolve_curve(spec: str) -> CurveModel:
    """Built-in name, ``harnack:<polygon>:<t>``, ``p1``, or a curve JSON file."""
    if spec in BUILTIN_CURVES:
        return BUILTIN_CURVES[spec]()
    if spec == "p1":
        return binary_line()
    if spec.startswith("harnack:"):
        parts = spec.split(":")
        try:
            poly = polygon_by_name(":".join(parts[1:-1]))
            t = int(parts[-1])
        except (ValueError, IndexError) as exc:
            raise UsageError(f"bad harnack curve spec {spec!r}") from exc
        return harnack_parametrization(HarnackSpec(poly, t))
    if Path(spec).suffix == ".json" or Path(spec).exists():
        data = _load_json(spec)
        try:
            return curve_from_json(data)
        except (KeyError, ValueError, TypeError) as exc:
            raise UsageError(f"cannot read curve from {spec}: {exc}") from exc
    raise UsageError(f"unknown curve {spec!r}")


def motzkin() -> Polynomial:
    x0, x1, x2 = Polynomial.variables(3)
    return x0**4 * x1**2 + x0**2 * x1**4 - 3 * x0**2 * x1**2 * x2**2 + x2**6


def deltoid_witness(j: int) -> Polynomial:
    """``(x2^2 - x1^2 - x0^2) (x0^2 + x1^2 + x2^2)^(j-1)``."""
    if j < 1:
        raise UsageError("deltoid-witness needs j >= 1")
    x0, x1, x2 = Polynomial.variables(3)
    return (x2**2 - x1**2 - x0**2) * (x0**2 + x1**2 + x2**2) ** (j - 1)


def resolve_f(spec: str, model: CurveModel, j: int | None):
    """Return ``(coords, j)`` for a built-in name, polynomial JSON or coordinate JSON."""
    if spec == "motzkin":
        poly = motzkin()
    elif spec.startswith("deltoid-witness:"):
        try:
            jj = int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise UsageError(f"bad f spec {spec!r}") from exc
        poly = deltoid_witness(jj)
    elif Path(spec).suffix == ".json" or Path(spec).exists():
        data = _load_json(spec)
        if "coords" in data:
            deg = int(data["degree"])
            coords = [Fraction(c) if isinstance(c, str) else float(c) for c in data["coords"]]
            if deg % 2:
                raise UsageError("f must have even degree")
            if j is not None and j != deg // 2:
                raise UsageError("--j does not match the degree of f")
            if len(coords) != model.hilbert_function(deg):
                raise UsageError("coordinate vector has the wrong length for this curve")
            return coords, deg // 2
        try:
            poly = Polynomial.from_json(data)
        except (KeyError, ValueError, TypeError) as exc:
            raise UsageError(f"cannot read polynomial from {spec}: {exc}") from exc
    else:
        raise UsageError(f"unknown f {spec!r}")
    if poly.nvars != model.nvars:
        raise UsageError(f"f has {poly.nvars} variables but the curve lives in {model.nvars}")
    deg = poly.degree()
    if deg % 2:
        raise UsageError("f must have even degree")
    if j is not None and j != deg // 2:
        raise UsageError("--j does not match the degree of f")
    return model.restrict(poly), deg // 2


def resolve_polygon(name: str | None, path: str | None) -> LatticePolygon:
    if path:
        data = _load_json(path)
        try:
            return LatticePolygon.from_json(data)
        except (KeyError, ValueError, TypeError) as exc:
            raise UsageError(f"cannot read polygon from {path}: {exc}") from exc
    if not name:
        raise UsageError("need a polygon name or file")
    if Path(name).suffix == ".json":
        return resolve_polygon(None, name)
    try:
        return polygon_by_name(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# output


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), separators=(",", ":"), allow_nan=False)


def _emit(args, obj):
    text = dumps(obj)
    if getattr(args, "json", None):
        Path(args.json).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


_QUIET = False


def _say(msg: str):
    if not _QUIET:
        print(msg, file=sys.stderr)


def _options(args) -> SolverOptions:
    return SolverOptions(eps_feas=args.eps_feas, eps_gap=EPS_GAP, max_iter=args.max_iter)


# ---------------------------------------------------------------------------
# subcommands


def cmd_invariants(args) -> int:
    model = resolve_curve(args.curve)
    inv = curve_invariants(model)
    top = max(inv.r, 0) + 3
    hf = [model.hilbert_function(m) for m in range(top + 1)]
    _emit(args, {"d": inv.d, "p_a": inv.p_a, "r": inv.r, "hf": hf})
    _say(f"degree {inv.d}, arithmetic genus {inv.p_a}, regularity index {inv.r}")
    return 0


def cmd_bound(args) -> int:
    chosen = [x is not None for x in (args.curve, args.polygon, args.surface, args.ci)]
    if sum(chosen) != 1:
        raise UsageError("give exactly one of --curve, --polygon, --surface, --ci")
    if args.curve:
        rep = bound_report(resolve_curve(args.curve))
        _emit(args, rep.to_json())
        _say(f"multiplier degree bound k = {rep.k_curve} (degree-only bound {rep.k_degree_only})")
        return 0
    if args.polygon:
        if args.j is None:
            raise UsageError("--polygon needs --j")
        inv = toric_curve_invariants(resolve_polygon(args.polygon, None), args.j)
        out = inv.to_json()
        out["k_curve"] = multiplier_degree_bound_curve(inv)
        _emit(args, out)
        _say(f"toric curve: k = {out['k_curve']}")
        return 0
    if args.ci:
        try:
            degrees = [int(x) for x in args.ci.split(",")]
        except ValueError as exc:
            raise UsageError("--ci expects comma-separated degrees") from exc
        forms = ci_closed_forms(degrees)
        _emit(args, {"deg": forms.deg, "p_a": forms.p_a, "k_bound": forms.k_bound})
        return 0
    if args.j is None:
        raise UsageError("--surface needs --j")
    if args.surface == "p2" and args.input_degree is not None:
        sched = p2_schedule_for_degree(args.input_degree)
    else:
        sched = surface_multiplier_schedule(args.surface, args.j, args.family)
    _emit(args, {"multiplier_degree": sched.multiplier_degree, "product_degree": sched.product_degree})
    return 0


def cmd_certify(args) -> int:
    model = resolve_curve(args.curve)
    f, j = resolve_f(args.f, model, args.j)
    if args.k is not None and args.kmax is not None:
        raise UsageError("give at most one of --k and --kmax")
    opts = _options(args)
    if args.k is not None:
        ks = [args.k]
    else:
        if args.kmax is not None:
            kmax = args.kmax
        else:
            kmax = multiplier_degree_bound_curve(curve_invariants(model))
        ks = list(range(kmax + 1))
    rows = []
    dumps_out = []
    final = None
    for k in ks:
        if args.dump_sdp:
            dumps_out.append({"k": k, "problem": build_multiplier_problem(model, f, j, k).to_json()})
        res = certify_multiplier(model, f, j, k, opts, delta=args.delta)
        rows.append(_outcome_row(k, res))
        _say(f"k = {k}: {rows[-1]['kind']}")
        final = res
        if isinstance(res, MultiplierCertificate) and not args.exhaustive:
            break
    if args.dump_sdp:
        Path(args.dump_sdp).write_text(dumps(dumps_out) + "\n")
    out = {"j": j, "outcomes": rows}
    _emit(args, out)
    kinds = [r["kind"] for r in rows]
    if "certificate" in kinds:
        return 0
    if kinds and kinds[-1] == "separator":
        return 2
    return 3


def _outcome_row(k: int, res) -> dict:
    if isinstance(res, MultiplierCertificate):
        return {"k": k, "kind": "certificate", "certificate": res.to_json()}
    if isinstance(res, StrictSeparator):
        return {"k": k, "kind": "separator", "separator": res.to_json()}
    return {"k": k, "kind": "indeterminate", "diagnostic": outcome_to_json(res)["diagnostic"]}


def cmd_separator_verify(args) -> int:
    model = resolve_curve(args.curve)
    f, j = resolve_f(args.f, model, None)
    data = _load_json(args.separator)
    if "outcomes" in data:
        seps = [o["separator"] for o in data["outcomes"] if o.get("kind") == "separator"]
        if not seps:
            raise UsageError("no separator in the given file")
        data = seps[-1]
    elif "separator" in data:
        data = data["separator"]
    try:
        sep = StrictSeparator.from_json(model, data)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot read separator: {exc}") from exc
    if sep.j != j:
        raise UsageError("separator was computed for a different degree of f")
    reasons: list = []
    ok = verify_separator(model, f, sep, args.delta, reasons)
    margin = separator_margin(model, f, sep) if not reasons or ok else None
    _emit(args, {"valid": ok, "margin": margin, "reasons": reasons})
    _say("separator verified" if ok else "separator rejected: " + "; ".join(reasons))
    return 0 if ok else 1


def cmd_harnack(args) -> int:
    Q = resolve_polygon(args.polygon, None)
    roots = None
    if args.roots:
        roots = [[Fraction(c) for c in edge] for edge in _load_json(args.roots)]
    try:
        spec = HarnackSpec(Q, args.t, roots)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    model = harnack_parametrization(spec)
    inv = curve_invariants(model)
    out = {"spec": spec.to_json(), "d": inv.d, "p_a": inv.p_a, "r": inv.r}
    if not args.no_nodes:
        out["nodes"] = detect_nodes(model).to_json()
    if args.out:
        Path(args.out).write_text(dumps(model.to_json()) + "\n")
    _emit(args, out)
    _say(f"Harnack curve of degree {inv.d}, genus {inv.p_a}")
    return 0


def cmd_polygon(args) -> int:
    Q = resolve_polygon(args.name, args.file)
    if args.j is None:
        inv = polygon_invariants(Q)
        _emit(args, {"two_area": inv.two_area, "boundary": inv.boundary, "interior": inv.interior,
                     "smooth": is_smooth(Q)})
        return 0
    _emit(args, toric_curve_invariants(Q, args.j).to_json())
    return 0


def cmd_pointed(args) -> int:
    model = resolve_curve(args.curve)
    res = check_pointed(model, args.j, args.delta, _options(args))
    out = {"pointed": res.pointed, "margin": None if res.pointed is None else res.margin}
    if res.pointed is True:
        out["witness"] = res.witness.coords.tolist()
    elif res.pointed is False:
        out["witness"] = res.witness
        out["residual"] = res.residual
        out["exact"] = res.exact
    else:
        out["diagnostic"] = res.diagnostic
    _emit(args, out)
    _say({True: "pointed", False: "not pointed", None: "indeterminate"}[res.pointed])
    return 3 if res.pointed is None else 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sosmult", description="Sum-of-squares multipliers on projective curves.")
    p.add_argument("--version", action="version",
                   version=f"sosmult {__version__} (eps_feas={EPS_FEAS}, eps_gap={EPS_GAP}, "
                           f"delta={SEPARATOR_DELTA}, max_iter={MAX_ITER})")
    p.add_argument("-q", "--quiet", action="store_true", help="no summary on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, solver=False):
        sp.add_argument("--json", metavar="PATH", help="write JSON here instead of stdout")
        if solver:
            sp.add_argument("--eps-feas", type=_positive_float, default=EPS_FEAS)
            sp.add_argument("--delta", type=_positive_float, default=SEPARATOR_DELTA)
            sp.add_argument("--max-iter", type=_positive_int, default=MAX_ITER)

    sp = sub.add_parser("invariants", help="degree, genus and regularity index of a curve")
    sp.add_argument("--curve", required=True)
    common(sp)
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("bound", help="multiplier degree bounds")
    sp.add_argument("--curve")
    sp.add_argument("--polygon")
    sp.add_argument("--surface", choices=["minimal", "p2"])
    sp.add_argument("--ci", help="comma-separated degrees of a complete intersection")
    sp.add_argument("--j", type=_nonneg_int)
    sp.add_argument("--family", choices=["4j", "4j-2"], default="4j")
    sp.add_argument("--input-degree", type=_positive_int)
    common(sp)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("certify", help="search for a multiplier certificate or a separator")
    sp.add_argument("--curve", required=True)
    sp.add_argument("--f", required=True)
    sp.add_argument("--j", type=_positive_int)
    sp.add_argument("--k", type=_nonneg_int)
    sp.add_argument("--kmax", type=_nonneg_int)
    sp.add_argument("--exhaustive", action="store_true")
    sp.add_argument("--dump-sdp", metavar="PATH")
    common(sp, solver=True)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("separator-verify", help="re-check a stored separator")
    sp.add_argument("--curve", required=True)
    sp.add_argument("--f", required=True)
    sp.add_argument("--separator", required=True)
    common(sp, solver=True)
    sp.set_defaults(func=cmd_separator_verify)

    sp = sub.add_parser("harnack", help="build a rational Harnack curve and report its nodes")
    sp.add_argument("--polygon", required=True)
    sp.add_argument("--t", type=_positive_int, required=True)
    sp.add_argument("--roots")
    sp.add_argument("--out")
    sp.add_argument("--no-nodes", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_harnack)

    sp = sub.add_parser("polygon", help="lattice polygon and toric curve invariants")
    sp.add_argument("--name")
    sp.add_argument("--file")
    sp.add_argument("--j", type=_positive_int)
    common(sp)
    sp.set_defaults(func=cmd_polygon)

    sp = sub.add_parser("pointed", help="test whether the cone of sums of squares is pointed")
    sp.add_argument("--curve", required=True)
    sp.add_argument("--j", type=_positive_int, required=True)
    common(sp, solver=True)
    sp.set_defaults(func=cmd_pointed)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    global _QUIET
    _QUIET = args.quiet
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sosmult: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - reported as a failed computation
        sys.stdout.write(dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        print(f"sosmult: computation failed: {exc}", file=sys.stderr)
        return EXIT_SOFTWARE


if __name__ == "__main__":
    raise SystemExit(main())
