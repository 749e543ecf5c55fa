"""Command-line front end: reproducible runs with JSON and CSV artifacts.

Every subcommand writes ``<out>/<name>.json`` (sorted keys, no timestamps,
so identical arguments give identical bytes) and a CSV of plottable data,
prints one PASS/FAIL line per invariant and exits 0 when all pass, 1 on an
invariant failure and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import karman_iter as ki
from . import legendre
from . import model1d
from . import monge_ampere as ma
from . import refined_theory as rt
from . import vekua_system as vs
from .config import PlateConfig

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    return v


def _write_json(out: Path, name: str, report: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{name}.json").write_text(json.dumps(_jsonable(report), sort_keys=True, indent=1) + "\n")


def _write_csv(out: Path, name: str, header: list, rows) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / f"{name}.csv", "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for r in rows:
            wr.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


def _finish(checks: dict, report: dict, out: Path, name: str) -> int:
    report["checks"] = {k: bool(v) for k, v in checks.items()}
    report["ok"] = all(checks.values())
    _write_json(out, name, report)
    for k, v in checks.items():
        print(f"{'PASS' if v else 'FAIL'} {name}:{k}")
    if not report["ok"]:
        failed = [k for k, v in checks.items() if not v]
        print(f"{name}: {len(failed)} invariant(s) failed: {', '.join(failed)}", file=sys.stderr)
    return EXIT_OK if report["ok"] else EXIT_FAIL


def _fraction(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from exc


def _fraction_list(s: str) -> list:
    return [_fraction(t) for t in s.split(",") if t.strip()]


def _int_list(s: str) -> list:
    try:
        return [int(t) for t in s.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a list of integers: {s!r}") from exc


# --- subcommands -----------------------------------------------------------------------


def cmd_demo1d(args) -> int:
    prob = model1d.Neumann1DProblem(tuple(args.f), args.alpha, args.beta)
    if not prob.compatible:
        print(f"demo1d: incompatible Neumann data, mean defect {prob.mean_defect}", file=sys.stderr)
        _write_json(args.out, "demo1d", {"ok": False, "error": "incompatible", "mean_defect": prob.mean_defect})
        return EXIT_FAIL
    shifted, corr = model1d.shift_to_homogeneous(prob)
    checks, rows = {}, []
    f = list(prob.f)
    # closed forms are known for f = p_1 (then alpha = beta)
    golden = f[:2] == [0, 1] and not any(f[2:])
    for N in args.N:
        zs = model1d.solve_q_basis(shifted, N)
        us = model1d.solve_legendre_basis(prob, N)
        rows.append(
            {
                "N": N,
                "z": list(zs.coeffs),
                "u": list(us.coeffs),
                "z_slopes": list(zs.boundary_slopes()),
                "u_slopes": list(us.boundary_slopes()),
                "residual_q": zs.residual_norm,
                "residual_p": us.residual_norm,
            }
        )
        checks[f"q_slopes_vanish_N{N}"] = zs.boundary_slopes() == (0, 0)
        if golden:
            checks[f"z1_N{N}"] = list(zs.coeffs) == [0, Fraction(-1, 3)] + [0] * (N - 1)
            checks[f"u_closed_form_N{N}"] = (
                us.coeffs[1] == Fraction(2, 5) + prob.alpha and us.coeffs[3] == Fraction(-1, 15)
            )
    report = {
        "f": list(prob.f),
        "alpha": prob.alpha,
        "beta": prob.beta,
        "golden_applicable": golden,
        "correction": {"linear": corr.linear, "quadratic": corr.quadratic},
        "rows": rows,
        "stability": model1d.stability_report(prob, args.N),
    }
    if golden:
        report["z_1"] = rows[0]["z"][1]
        report["u_1"] = rows[0]["u"][1]
        report["u_3"] = rows[0]["u"][3]
    N = args.N[-1]
    sq = model1d.solve_q_basis(shifted, N)
    sq.correction = corr
    sp = model1d.solve_legendre_basis(prob, N)
    x = np.linspace(-1, 1, args.samples)
    _write_csv(args.out, "demo1d", ["x", "u_q", "u_p"], zip(x, sq(x), sp(x)))
    return _finish(checks, report, args.out, "demo1d")


def cmd_ma_verify(args) -> int:
    rnd = random.Random(args.seed)
    counts = {"decomposition": 0, "complex_factor": 0, "laplacian_expansion": 0, "grouping_variant_fails": 0}
    rows = []
    for t in range(args.trials):
        u, v = ma.random_poly2(rnd, args.deg), ma.random_poly2(rnd, args.deg)
        dec = ma.divergence_decomposition(u, v)
        cplx = ma.to_complex(ma.bracket(u, v)) == -4 * ma.bracket_complex(ma.to_complex(u), ma.to_complex(v))
        lap = ma.laplacian_bracket_expansion(u, v)
        alt = ma.divergence_decomposition(u, v, "printed")
        counts["decomposition"] += dec.ok
        counts["complex_factor"] += cplx
        counts["laplacian_expansion"] += lap.ok
        counts["grouping_variant_fails"] += not alt.ok
        rows.append((t, len(u), len(v), int(dec.ok), int(cplx), int(lap.ok), int(alt.ok)))
    checks = {k: counts[k] == args.trials for k in ("decomposition", "complex_factor", "laplacian_expansion")}
    report = {"deg": args.deg, "trials": args.trials, "seed": args.seed, "counts": counts}
    _write_csv(args.out, "ma_verify", ["trial", "terms_u", "terms_v", "decomposition", "complex", "laplacian", "variant"], rows)
    return _finish(checks, report, args.out, "ma_verify")


def _plate_from_args(args) -> PlateConfig:
    if getattr(args, "config", None):
        return _load_config(args.config, args)[0]
    return PlateConfig(lam=args.lam, mu=args.mu, h=args.h, a=args.a, b=args.b)


def cmd_korn(args) -> int:
    cfg = _plate_from_args(args)
    rng = np.random.default_rng(args.seed)
    rep = vs.korn_check(cfg, args.N, args.trials, rng, P=args.P, Q=args.Q, tol=args.tol)
    report = {"config": cfg.to_dict(), "seed": args.seed, **rep.to_dict()}
    checks = {
        "margin_grad_nonnegative": rep.margin_grad >= -args.tol,
        "margin_fried_nonnegative": rep.margin_fried >= -args.tol,
        "no_violations": rep.ok,
    }
    _write_csv(args.out, "korn", ["trial", "lhs", "bound_grad", "bound_fried"], zip(range(rep.trials), rep.lhs, rep.bound_grad, rep.bound_fried))
    return _finish(checks, report, args.out, "korn")


def cmd_vekua_solve(args) -> int:
    cfg = _plate_from_args(args)
    loads = vs.SurfaceLoads.pressure(args.q, args.P, args.Q, face=args.face)
    U = vs.solve(cfg, loads, args.N)
    d = vs.face_trace_defect(U, loads, cfg)
    x, y = np.linspace(0, cfg.a, args.grid), np.linspace(0, cfg.b, args.grid)
    mid = U.midplane(x, y)
    k1, k2 = np.pi / cfg.a, np.pi / cfg.b
    sym = vs.symbol(cfg, args.N, k1, k2)
    W = np.diag(np.repeat([1.0 / (2 * n + 1) for n in range(args.N + 1)], 3))
    herm = float(np.max(np.abs(W @ sym - (W @ sym).conj().T)))
    report = {
        "config": cfg.to_dict(),
        "N": args.N,
        "modes": [args.P, args.Q],
        "load": {"q": args.q, "face": args.face},
        "face_defects": d.to_dict(),
        "w0_mode11": float(U.coeffs[0, 2, 0, 0]),
        "max_midplane_u3": float(np.max(np.abs(mid[2]))),
        "symbol_weighted_hermitian_defect": herm,
        "moments": U.to_dict(),
    }
    checks = {
        "difference_basis_face_exact": max(d.difference_plus, d.difference_minus) <= args.tol,
        "weighted_symbol_hermitian": herm <= 1e-10,
    }
    X, Y = np.meshgrid(x, y, indexing="ij")
    _write_csv(args.out, "vekua_solve", ["x", "y", "u1", "u2", "u3"], zip(X.ravel(), Y.ravel(), *(m.ravel() for m in mid)))
    return _finish(checks, report, args.out, "vekua_solve")


def cmd_karman(args) -> int:
    params = ki.IterationParams(a=args.a, b=args.b, c=args.c, m_max=args.steps, tol=args.norm_tol)
    trace = ki.run_iteration(ma.Z**args.n * ma.ZB**args.n, params)
    bound = ki.cp_bound_check(args.p_max)
    report = {
        "n": args.n,
        "in_convergence_regime": params.in_convergence_regime,
        "trace": trace.summary(),
        "cp_bound": {k: bound[k] for k in ("holds", "first_violation", "valid_range", "range_boundary", "boundary_note")},
    }
    checks = {
        "converged": trace.verdict == "converged",
        "eventually_decreasing": ki.eventually_decreasing(trace.norms),
        "cp_bound_holds": bound["holds"],
    }
    _write_csv(args.out, "karman", ["m", "norm_U"], enumerate(trace.norms))
    return _finish(checks, report, args.out, "karman")


def _load_config(path: Path, args) -> tuple:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    geo = {k: data[k] for k in ("a", "b", "lambda_star") if k in data}
    gamma = args.gamma if getattr(args, "gamma", None) is not None else data.get("gamma", 0.0)
    try:
        if "E" in data:
            cfg = PlateConfig.from_engineering(data["E"], data["nu"], data["h"], gamma=gamma, **geo)
        else:
            cfg = PlateConfig(lam=data["lambda"], mu=data["mu"], h=data["h"], gamma=gamma, **geo)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid plate config: {exc}") from exc
    return cfg, data.get("loads", {})


def _plate_loads(spec: dict, modes: int) -> vs.SurfaceLoads:
    if "pressure" in spec:
        m = spec.get("mode", [1, 1])
        if max(m) > modes:
            raise UsageError("load mode exceeds --modes")
        return vs.SurfaceLoads.pressure(spec["pressure"], modes, modes, tuple(m), spec.get("face", "+"))
    try:
        gp = np.asarray(spec.get("g_plus", np.zeros((3, 1, 1))), dtype=float)
        gm = np.asarray(spec.get("g_minus", np.zeros((3, 1, 1))), dtype=float)
        return vs.SurfaceLoads(gp, gm)
    except ValueError as exc:
        raise UsageError(f"invalid loads: {exc}") from exc


def cmd_plate_solve(args) -> int:
    cfg, lspec = _load_config(args.config, args)
    prob = rt.BendingProblem(cfg, _plate_loads(lspec, args.modes)).resized(args.modes)
    res = rt.solve_linear_plate(prob)
    res.Q = rt.shear_forces(res.w, prob)
    _, _, kk = rt.wavenumbers(cfg, args.modes, args.modes)
    rhs = rt.bending_rhs(prob).total
    mode_res = float(np.max(np.abs(cfg.D * kk**2 * res.w - rhs)) / max(1.0, float(np.max(np.abs(rhs)))))
    x, y = np.linspace(0, cfg.a, args.grid), np.linspace(0, cfg.b, args.grid)
    W = res.w_grid(x, y)
    Qg = res.Q_grid(x, y)
    checks = {"mode_equation": mode_res <= args.tol}
    ld = prob.loads
    if cfg.gamma == -0.5 and not ld.g_plus[:2].any() and not ld.g_minus[:2].any() and ld.f_moments is None:
        navier = -(ld.g_plus[2] - ld.g_minus[2]) / (cfg.D * kk**2)
        checks["kirchhoff_limit"] = bool(np.allclose(res.w, navier, rtol=1e-12, atol=0))
    report = {
        "config": cfg.to_dict(),
        "modes": args.modes,
        "max_deflection": float(np.max(np.abs(W))),
        "mode_equation_residual": mode_res,
        "per_mode": res.modes,
        "sign_convention": "w is positive along -sigma_33 of the loaded face (downward for top pressure)",
    }
    X, Y = np.meshgrid(x, y, indexing="ij")
    _write_csv(args.out, "plate_w", ["x", "y", "w"], zip(X.ravel(), Y.ravel(), W.ravel()))
    _write_csv(args.out, "plate_Q", ["x", "y", "Q1", "Q2"], zip(X.ravel(), Y.ravel(), Qg[0].ravel(), Qg[1].ravel()))
    return _finish(checks, report, args.out, "plate_solve")


# --- parser ---------------------------------------------------------------------------------


def _add_plate_args(p):
    p.add_argument("--config", type=Path, help="JSON plate config (overrides the material flags)")
    p.add_argument("--lam", type=float, default=1.5)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--h", type=float, default=0.2)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--P", type=int, default=3)
    p.add_argument("--Q", type=int, default=3)


def _common(suppress: bool) -> argparse.ArgumentParser:
    # subcommand copies use SUPPRESS so they do not overwrite flags given before the subcommand
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=d(0), help="RNG seed for randomized trials")
    common.add_argument("--out", type=Path, default=d(Path("vekuaplate_out")), help="output directory")
    common.add_argument("--tol", type=float, default=d(1e-10), help="tolerance for pass/fail checks")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vekuaplate", description=__doc__.splitlines()[0], parents=[_common(False)])
    sub = parser.add_subparsers(dest="cmd", required=True)
    common = _common(True)

    p = sub.add_parser("demo1d", parents=[common], help="1D Neumann model in both bases")
    p.add_argument("--f", type=_fraction_list, default=[Fraction(0), Fraction(1)], help="Legendre coefficients of f")
    p.add_argument("--alpha", type=_fraction, default=Fraction(0))
    p.add_argument("--beta", type=_fraction, default=Fraction(0))
    p.add_argument("--N", type=_int_list, default=[3, 4, 5, 8])
    p.add_argument("--samples", type=int, default=21)
    p.set_defaults(func=cmd_demo1d)

    p = sub.add_parser("ma-verify", parents=[common], help="exact Monge-Ampere identity suite")
    p.add_argument("--deg", type=int, default=6)
    p.add_argument("--trials", type=int, default=50)
    p.set_defaults(func=cmd_ma_verify)

    p = sub.add_parser("korn", parents=[common], help="Korn-type bounds on random moment fields")
    p.add_argument("--N", type=int, default=4)
    p.add_argument("--trials", type=int, default=20)
    _add_plate_args(p)
    p.set_defaults(func=cmd_korn)

    p = sub.add_parser("vekua-solve", parents=[common], help="moment system under a face pressure")
    p.add_argument("--N", type=int, default=4)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--face", choices=["+", "-"], default="-")
    p.add_argument("--grid", type=int, default=9)
    _add_plate_args(p)
    p.set_defaults(func=cmd_vekua_solve)

    p = sub.add_parser("karman", parents=[common], help="complex iteration from (z zb)^n")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--a", type=_fraction, default=Fraction(1))
    p.add_argument("--b", type=_fraction, default=Fraction(1))
    p.add_argument("--c", type=_fraction, default=Fraction(0))
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--p-max", dest="p_max", type=int, default=20)
    p.add_argument("--norm-tol", dest="norm_tol", type=float, default=1e-8, help="majorant norm stopping level")
    p.set_defaults(func=cmd_karman)

    p = sub.add_parser("plate-solve", parents=[common], help="linear refined plate on a rectangle")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--modes", type=int, default=32)
    p.add_argument("--grid", type=int, default=11)
    p.set_defaults(func=cmd_plate_solve)
    return parser


def _validate(args) -> None:
    for name in ("trials", "modes", "grid", "samples", "P", "Q", "steps", "deg"):
        v = getattr(args, name, None)
        if v is not None and v < 1:
            raise UsageError(f"--{name} must be positive")
    if getattr(args, "N", None) is not None:
        Ns = args.N if isinstance(args.N, list) else [args.N]
        lo = 3 if args.cmd == "demo1d" else 0
        if not Ns or min(Ns) < lo:
            raise UsageError(f"--N must be at least {lo}")
    if args.cmd == "karman" and args.n < 1:
        raise UsageError("--n must be positive")
    if args.cmd == "karman" and args.p_max < 2:
        raise UsageError("--p-max must be at least 2")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        _validate(args)
        return args.func(args)
    except (UsageError, legendre.DomainError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
