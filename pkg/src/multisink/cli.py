"""Command-line front end emitting reproducible CSV/JSON artifacts.

Every command is deterministic: identical flags produce byte-identical
output.  Floats are serialised with repr (shortest round-trip).  Exit
codes: 0 success, 2 domain/validation error, 3 no root, 4 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys

import numpy as np

from . import __version__
from .asymptotics import (
    pstar_approx,
    t_minus_expansion,
    t_plus_expansion,
    t_sum_expansion,
)
from .errors import DomainError, NoRootError, NonConvergenceError
from .flowfield import (
    StagnationKind,
    sample_grid,
    stagnation_points,
    vorticity_angular,
)
from .gluing import (
    TWO_PI,
    GluingSpec,
    SolveStatus,
    assemble,
    enumerate_gluings,
    period_sum,
    solve_critical_pressure,
)
from .local_solutions import Branch, Parameters, evaluate_profile, period
from .numerics import QuadratureSpec

_KNOT_SENTINEL = "nan"


def _fmt(x) -> str:
    return repr(float(x))


def _meta_line(args, **extra) -> str:
    def show(v):
        return repr(float(v)) if isinstance(v, (float, np.floating)) else repr(v)

    parts = [f"tool=multisink-{__version__}", f"command={args.command}"]
    for key in ("lam", "pressure", "gluing", "tol"):
        if getattr(args, key, None) is not None:
            parts.append(f"{key.replace('lam', 'lambda')}={show(getattr(args, key))}")
    parts.extend(f"{k}={show(v)}" for k, v in extra.items())
    return "# " + " ".join(parts)


def _emit(args, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _quad_spec(args) -> QuadratureSpec:
    tol = getattr(args, "tol", None)
    if tol is None:
        return QuadratureSpec()
    return QuadratureSpec(relative_tolerance=tol, absolute_floor=min(1e-15, tol * 1e-4))


def _report(args, pairs: list[tuple[str, object]]) -> None:
    if getattr(args, "format", "csv") == "json":
        payload = {k: v for k, v in pairs}
        _emit(args, [json.dumps(payload, sort_keys=True)])
    else:
        _emit(args, [f"{k}={_fmt(v) if isinstance(v, float) else v}" for k, v in pairs])


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_periods(args) -> int:
    params = Parameters(args.lam, args.pressure)
    quad = _quad_spec(args)
    tp = period(Branch.PLUS, params, quad)
    tm = period(Branch.MINUS, params, quad)
    _report(args, [("T_plus", tp), ("T_minus", tm), ("T_sum", tp + tm)])
    return 0


def _cmd_period_curve(args) -> int:
    if args.pmin >= 0 or args.pmax >= 0 or args.pmin > args.pmax:
        raise DomainError("require pmin <= pmax < 0")
    quad = _quad_spec(args)
    n = args.n
    if n < 1:
        raise DomainError("n must be positive")
    ps = -np.logspace(math.log10(-args.pmin), math.log10(-args.pmax), n) if n > 1 else np.array([args.pmin])
    lines = [_meta_line(args, pmin=args.pmin, pmax=args.pmax, n=n),
             "P,T_plus,T_minus,T_sum,T_sum_minus_pi"]
    for p in ps:
        params = Parameters(args.lam, float(p))
        tp = period(Branch.PLUS, params, quad)
        tm = period(Branch.MINUS, params, quad)
        lines.append(",".join(_fmt(v) for v in (p, tp, tm, tp + tm, tp + tm - math.pi)))
    _emit(args, lines)
    return 0


def _cmd_solve(args) -> int:
    spec = GluingSpec.parse(args.gluing)
    res = solve_critical_pressure(spec, args.lam)
    if res.status is SolveStatus.NO_ROOT:
        print(
            f"status=no_root scanned_minus_P=[{res.scanned[0]:g},{res.scanned[1]:g}]",
            file=sys.stderr,
        )
        return 3
    if res.status is SolveStatus.DEGENERATE_SHEAR:
        _report(args, [("status", "degenerate_shear"), ("P_star", 0.0),
                       ("residual", 0.0), ("root_count", 0)])
        return 0
    _report(args, [("status", "found"), ("P_star", res.pressure),
                   ("minus_2P_star", -2.0 * res.pressure),
                   ("residual", res.residual), ("root_count", res.root_count)])
    return 0


def _cmd_profile(args) -> int:
    spec = GluingSpec.parse(args.gluing)
    prof = assemble(spec, args.lam, max(args.samples // max(len(spec.sequence), 1), 64))
    thetas = np.linspace(0.0, TWO_PI, args.samples, endpoint=False)
    psi, dpsi = prof.psi_dpsi(thetas)
    knots = prof.knots
    dist = np.min(
        np.abs((thetas[:, None] - knots[None, :] + math.pi) % TWO_PI - math.pi), axis=1
    )
    lines = [_meta_line(args, pstar=prof.pressure), "theta,psi,dpsi,vorticity_angular"]
    for i, th in enumerate(thetas):
        if dist[i] < 1e-12:
            w = _KNOT_SENTINEL
        else:
            w = _fmt(vorticity_angular(prof, th)[0])
        lines.append(f"{_fmt(th)},{_fmt(psi[i])},{_fmt(dpsi[i])},{w}")
    _emit(args, lines)
    return 0


def _parse_four(text: str, what: str) -> tuple[float, ...]:
    parts = text.split(",")
    if len(parts) != 4:
        raise DomainError(f"{what} must have four comma-separated values")
    return tuple(float(p) for p in parts)


def _cmd_field(args) -> int:
    spec = GluingSpec.parse(args.gluing)
    prof = assemble(spec, args.lam)
    bbox = _parse_four(args.bbox, "--bbox")
    nx, ny = (int(v) for v in args.grid.split(","))
    grid = sample_grid(prof, bbox, nx, ny, args.field)
    lines = [_meta_line(args, pstar=prof.pressure, bbox=args.bbox, grid=args.grid,
                        field=args.field), "x,y,u,v"]
    for x, y, u, v in grid.rows():
        lines.append(",".join(_fmt(t) for t in (x, y, u, v)))
    sidecar = {
        "stagnation_points": [
            {
                "angle": p.angle,
                "radius": float(p.radius),
                "kind": p.kind.value,
                "eigenvalues": list(p.eigenvalues) if p.eigenvalues else None,
            }
            for p in stagnation_points(prof)
        ]
    }
    side_text = json.dumps(sidecar, sort_keys=True)
    if args.out:
        _emit(args, lines)
        base = args.out[:-4] if args.out.endswith(".csv") else args.out
        with open(base + ".stagnation.json", "w", newline="") as fh:
            fh.write(side_text + "\n")
    else:
        _emit(args, lines + [side_text])
    return 0


def _cmd_pstar_table(args) -> int:
    lams = [float(t) for t in args.lambdas.split(",") if t.strip()] if args.lambdas else []
    lines = [_meta_line(args, lambdas=args.lambdas), "lambda,minus_2P_star,ratio_Pstar_alpha2"]
    for lam in lams:
        res = solve_critical_pressure(GluingSpec.parse("P,M,P,M"), lam)
        q = -2.0 * res.pressure
        ratio = (q / 2.0) / (2.0 - lam) ** 2
        lines.append(f"{_fmt(lam)},{_fmt(q)},{_fmt(ratio)}")
    _emit(args, lines)
    return 0


def _cmd_asymptotics(args) -> int:
    params = Parameters(args.lam, args.pressure)
    if args.pressure >= 0.0:
        raise DomainError("asymptotics requires pressure < 0")
    tp_q = period(Branch.PLUS, params)
    tm_q = period(Branch.MINUS, params)
    tp_e = t_plus_expansion(args.lam, args.pressure)
    tm_e = t_minus_expansion(args.lam, args.pressure)
    ts_e = t_sum_expansion(args.lam, args.pressure)
    pairs = [
        ("regime", tp_e.regime.value),
        ("T_plus_quadrature", tp_q),
        ("T_plus_expansion", tp_e.value),
        ("T_minus_quadrature", tm_q),
        ("T_minus_expansion", tm_e.value),
        ("T_sum_quadrature", tp_q + tm_q),
        ("T_sum_expansion", ts_e.value),
        ("pstar_quadratic", pstar_approx(args.lam, "quadratic")),
    ]
    if args.lam > 1.5:
        pairs.append(("pstar_implicit", pstar_approx(args.lam, "implicit")))
    _report(args, pairs)
    return 0


def _cmd_classify(args) -> int:
    outcomes = enumerate_gluings(args.lam, args.max_pieces)
    lines = [_meta_line(args, max_pieces=args.max_pieces),
             "n_plus,n_minus,status,P_star,root_count"]
    for o in outcomes:
        p = _fmt(o.pressure) if o.pressure is not None else ""
        lines.append(f"{o.n_plus},{o.n_minus},{o.status.value},{p},{o.root_count}")
    _emit(args, lines)
    return 0


def _cmd_shear_convergence(args) -> int:
    lam = args.lam
    pressures = [float(t) for t in args.pressures.split(",") if t.strip()]
    thetas = np.linspace(0.0, 0.75 * math.pi, 512)
    psi_s = lam ** (-lam) * np.sin(thetas) ** lam
    dpsi_s = lam ** (1.0 - lam) * np.sin(thetas) ** (lam - 1.0) * np.cos(thetas)
    dpsi_s[0] = 0.0
    lines = [_meta_line(args, pressures=args.pressures),
             "P,sup_psi_error,sup_dpsi_error"]
    for p in pressures:
        params = Parameters(lam, p)
        if period(Branch.PLUS, params) < 0.75 * math.pi:
            raise DomainError(
                f"PLUS lifespan at P={p} is below 3*pi/4; choose P closer to 0"
            )
        psi, dpsi = evaluate_profile(Branch.PLUS, params, thetas)
        lines.append(",".join(_fmt(v) for v in (
            p, np.max(np.abs(psi - psi_s)), np.max(np.abs(dpsi - dpsi_s)))))
    _emit(args, lines)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


# Treat any "-<digit>..." token as a value, so scientific-notation
# negatives ("-1e-7") and negative lists ("-1e-2,-1e-4") parse as flags'
# arguments rather than options.
_NEGATIVE_NUMBER = re.compile(r"^-(\d|\.\d).*$")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multisink",
        description="Homogeneous multi-sink profiles of the planar ideal-flow equations",
    )
    parser._negative_number_matcher = _NEGATIVE_NUMBER
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **needs):
        p = sub.add_parser(name)
        p._negative_number_matcher = _NEGATIVE_NUMBER
        if needs.get("lam", True):
            p.add_argument("--lambda", dest="lam", type=float, required=True)
        if needs.get("pressure"):
            p.add_argument("--pressure", type=float, required=True)
        if needs.get("gluing"):
            p.add_argument("--gluing", type=str, required=True)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--tol", type=float, default=None)
        p.set_defaults(func=fn)
        return p

    add("periods", _cmd_periods, pressure=True)

    p = add("period-curve", _cmd_period_curve)
    p.add_argument("--pmin", type=float, required=True)
    p.add_argument("--pmax", type=float, required=True)
    p.add_argument("--n", type=int, required=True)

    add("solve", _cmd_solve, gluing=True)

    p = add("profile", _cmd_profile, gluing=True)
    p.add_argument("--samples", type=int, default=512)

    p = add("field", _cmd_field, gluing=True)
    p.add_argument("--bbox", type=str, required=True)
    p.add_argument("--grid", type=str, required=True)
    p.add_argument("--field", choices=("velocity", "pseudo"), default="pseudo")

    p = sub.add_parser("pstar-table")
    p.add_argument("--lambdas", type=str, default="")
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=_cmd_pstar_table, lam=None)

    add("asymptotics", _cmd_asymptotics, pressure=True)

    p = add("classify", _cmd_classify)
    p.add_argument("--max-pieces", dest="max_pieces", type=int, required=True)

    p = add("shear-convergence", _cmd_shear_convergence)
    p.add_argument("--pressures", type=str, required=True)

    for child in sub.choices.values():
        child._negative_number_matcher = _NEGATIVE_NUMBER
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except NoRootError as exc:
        print(f"no root: {exc}", file=sys.stderr)
        return 3
    except NonConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
