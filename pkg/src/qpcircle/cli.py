"""Command-line front end: ``qpcircle classify | circle | continue | verify | grid``.

Exit codes: 0 success, 2 orbit not quasiperiodic (or escaped), 3 solver or
verification failure, 4 unreadable or malformed input.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import os
import sys
from contextlib import nullcontext

import numpy as np

from . import birkhoff as bk
from . import fourier as fs
from .continuation import ContinuationConfig, ContinuationRecord, FamilyResult, StopReason, continue_family
from .io import CircleFile, FamilyFile, SchemaError, dumps
from .maps import Family, MapOverflowError, MapSpec, iterate_orbit
from .projection import DegenerateProjection, project_angles
from .recipe import NotQuasiperiodic, RecipeConfig, RecipeError, run_recipe
from .solver import SolverError, unfolding_diagnostics

EXIT_OK, EXIT_NOT_QP, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4
THREADS_ENV = "QPCIRCLE_NUM_THREADS"

# documented tolerances for ``verify``
VERIFY_DEFECT = 1e-10
VERIFY_SYMMETRY = 1e-12
VERIFY_UNFOLDING = 1e-10
VERIFY_AREA = 1e-7

log = logging.getLogger("qpcircle")


def _point(text: str) -> tuple[float, float]:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}") from None
    return x, y


def _add_map_args(p):
    p.add_argument("--map", choices=[f.value for f in Family], default="henon")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--alpha", type=float, help="map parameter in radians")
    g.add_argument("--alpha-cos", type=float, help="set alpha = acos(value)")


def _spec(args) -> MapSpec:
    if args.alpha_cos is not None:
        alpha = math.acos(args.alpha_cos)
    elif args.alpha is not None:
        alpha = args.alpha
    else:
        raise SystemExit("one of --alpha / --alpha-cos is required")
    return MapSpec(Family(args.map), alpha)


def cmd_classify(args) -> int:
    spec = _spec(args)
    center = np.array(args.center) if args.center else spec.center
    try:
        orbit = iterate_orbit(spec, args.seed, args.m, stride=args.period)
        cls = bk.classify_orbit(project_angles(orbit, center), tol=args.tol)
    except (MapOverflowError, DegenerateProjection) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_QP
    label = "Quasiperiodic" if cls.quasiperiodic else "NonConvergent"
    print(f"{'M':>10}  rho_M")
    for M, rho in cls.estimate.history:
        print(f"{M:>10}  {rho:.15f}")
    print(f"classification: {label}  (spread {cls.estimate.spread:.3e})")
    if args.json:
        payload = {"map": {"family": spec.family.value, "alpha": spec.alpha}, "seed": list(args.seed),
                   "period": args.period, "classification": label, "rho": cls.estimate.rho,
                   "spread": cls.estimate.spread, "history": [[M, r] for M, r in cls.estimate.history]}
        with open(args.json, "w") as fh:
            fh.write(dumps(payload))
    return EXIT_OK if cls.quasiperiodic else EXIT_NOT_QP


def write_samples(path, system: fs.CircleSystem, n: int, mod_2pi: bool = False) -> None:
    """CSV with columns ``theta,x,y,component_index``; ``n`` rows per circle."""
    theta = np.arange(n) / n
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta", "x", "y", "component_index"])
        for j, K in enumerate(system.circles):
            pts = fs.curve_samples(K, n) if n >= 2 * K.N + 1 else K(theta)
            x = np.mod(pts[:, 0], 2 * np.pi) if mod_2pi else pts[:, 0]
            for t, xx, yy in zip(theta, x, pts[:, 1]):
                w.writerow([repr(float(t)), repr(float(xx)), repr(float(yy)), j])


def cmd_circle(args) -> int:
    spec = _spec(args)
    cfg = RecipeConfig(spec, args.seed, period=args.period, n_modes=args.n_modes,
                       center=args.center, M_classify=args.m_classify, M_rho=args.m_rho,
                       M_coeff=args.m_coeff)
    try:
        res = run_recipe(cfg)
    except NotQuasiperiodic as exc:
        print(f"step 0 rejected the seed: {exc}", file=sys.stderr)
        return EXIT_NOT_QP
    except MapOverflowError as exc:
        print(f"orbit escaped: {exc}", file=sys.stderr)
        return EXIT_NOT_QP
    except (RecipeError, SolverError, bk.DecayFitError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    out = CircleFile.from_solution(spec, res.system, res.report, seed=list(args.seed), period=args.period,
                                   M_classify=cfg.M_classify, M_rho=res.rho.M, M_coeff=cfg.M_coeff,
                                   N0=res.N0, newton_iterations=res.report.iterations)
    print(f"rho = {res.system.rho:.15f}  (per iterate {res.system.rho / res.system.d:.15f})")
    print(f"N = {res.N}, d = {res.system.d}, defect = {res.report.final_defect:.3e}, "
          f"iterations = {res.report.iterations}")
    try:
        if args.out:
            out.write(args.out)
        if args.plot:
            write_samples(args.plot, res.system, args.samples, args.mod_2pi)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_continue(args) -> int:
    try:
        cf = CircleFile.read(args.input)
    except SchemaError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_IO
    start = ContinuationRecord.from_system(cf.system, cf.spec)
    print(f"{'rho':>18}  {'N':>4}  {'defect':>9}  {'log10 S1':>9}  {'log10 S5':>9}  {'log10 S10':>9}")

    def show(rec):
        s = dict(rec.log_sobolev)
        cols = [s.get(float(d), float("nan")) / math.log(10) for d in (1, 5, 10)]
        print(f"{rec.rho:18.15f}  {rec.system.N:4d}  {rec.defect:9.2e}  " + "  ".join(f"{c:9.3f}" for c in cols))

    show(start)
    if args.step < args.min_step:
        fam = FamilyResult([start], StopReason.STEP_UNDERFLOW, cf.spec, args.direction)
    else:
        cfg = ContinuationConfig(initial_step=args.step, min_step=args.min_step, max_steps=args.max_steps,
                                 blowup_factor=args.blowup_factor, N_max=args.n_max)
        fam = continue_family(start, cf.spec, cfg, args.direction, callback=show)
    print(f"stop: {fam.stop_reason.value} after {len(fam.records)} records {fam.message}")
    if args.out:
        try:
            FamilyFile.from_family(fam, source=str(args.input), step=args.step).write(args.out)
        except OSError as exc:
            print(f"cannot write output: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_SOLVER if fam.stop_reason is StopReason.SOLVER_HARD_FAILURE else EXIT_OK


def verify_circle(cf: CircleFile) -> list[tuple[str, float, float, bool]]:
    """``(check, value, tolerance, passed)`` rows for a stored circle."""
    rows = []
    dfc = fs.defect(cf.system, cf.spec)
    rows.append(("defect", dfc, VERIFY_DEFECT, dfc <= VERIFY_DEFECT))
    sym = max(max(fs.symmetry_residual(K.a), fs.symmetry_residual(K.b)) for K in cf.system.circles)
    rows.append(("conjugate symmetry", sym, VERIFY_SYMMETRY, sym <= VERIFY_SYMMETRY))
    u = cf.unfolding or {}
    unf = max([abs(u.get("beta", 0.0))] + [abs(v) for v in u.get("gamma", []) + u.get("omega", [])])
    rows.append(("unfolding parameters", unf, VERIFY_UNFOLDING, unf <= VERIFY_UNFOLDING))
    worst = 0.0
    try:
        for K in cf.system.circles:
            a1, _, a3 = unfolding_diagnostics(K, cf.spec, cf.rho)
            worst = max(worst, abs(a1 - a3) / abs(a1))
    except fs.SymmetryError:
        worst = float("inf")
    rows.append(("area |A1-A3|/|A1|", worst, VERIFY_AREA, worst <= VERIFY_AREA))
    return rows


def cmd_verify(args) -> int:
    try:
        cf = CircleFile.read(args.input)
    except SchemaError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_IO
    rows = verify_circle(cf)
    for name, val, tol, ok in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<22} {val:10.3e}  (tol {tol:.0e})")
    ok = all(r[3] for r in rows)
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_SOLVER


def _axis(text: str) -> np.ndarray:
    try:
        lo, hi, n = text.split(":")
        return np.linspace(float(lo), float(hi), int(n))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo:hi:n', got {text!r}") from None


def cmd_grid(args) -> int:
    spec = _spec(args)
    center = np.array(args.center) if args.center else spec.center
    w = csv.writer(sys.stdout)
    w.writerow(["x", "y", "classification", "rho", "spread"])
    for x in args.x:
        for y in args.y:
            try:
                cls = bk.classify_orbit(project_angles(iterate_orbit(spec, (x, y), args.m), center))
                row = ["Quasiperiodic" if cls.quasiperiodic else "NonConvergent",
                       repr(cls.estimate.rho), repr(cls.estimate.spread)]
            except (MapOverflowError, DegenerateProjection):
                row = ["Escaped", "", ""]
            w.writerow([repr(float(x)), repr(float(y))] + row)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qpcircle", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a seed orbit and print its rotation-number history")
    _add_map_args(p)
    p.add_argument("--seed", type=_point, required=True)
    p.add_argument("--m", type=int, default=20_000, help="orbit length")
    p.add_argument("--period", type=int, default=1, help="sample every period-th iterate")
    p.add_argument("--center", type=_point)
    p.add_argument("--tol", type=float, default=bk.DEFAULT_CLASSIFY_TOL)
    p.add_argument("--json")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("circle", help="compute a parameterized invariant circle (system) from a seed")
    _add_map_args(p)
    p.add_argument("--seed", type=_point, required=True)
    p.add_argument("--period", type=int, default=1)
    p.add_argument("--n-modes", type=int)
    p.add_argument("--center", type=_point)
    p.add_argument("--m-classify", type=int, default=20_000)
    p.add_argument("--m-rho", type=int, default=200_000)
    p.add_argument("--m-coeff", type=int, default=10_000)
    p.add_argument("--out")
    p.add_argument("--plot", help="CSV of curve samples")
    p.add_argument("--samples", type=int, default=512, help="samples per circle in --plot")
    p.add_argument("--mod-2pi", action="store_true", help="reduce x modulo 2 pi in --plot")
    p.set_defaults(func=cmd_circle)

    p = sub.add_parser("continue", help="continue a stored circle in the rotation number")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--direction", type=int, choices=[1, -1], default=1)
    p.add_argument("--min-step", type=float, default=1e-13)
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--blowup-factor", type=float, default=1e6)
    p.add_argument("--n-max", type=int, default=512)
    p.add_argument("--out")
    p.set_defaults(func=cmd_continue)

    p = sub.add_parser("verify", help="re-check a stored circle")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("grid", help="classify seeds on a rectangular grid (CSV to stdout)")
    _add_map_args(p)
    p.add_argument("--x", type=_axis, required=True, help="lo:hi:n")
    p.add_argument("--y", type=_axis, required=True, help="lo:hi:n")
    p.add_argument("--m", type=int, default=5_000)
    p.add_argument("--center", type=_point)
    p.set_defaults(func=cmd_grid)
    return ap


def _thread_limit():
    n = os.environ.get(THREADS_ENV)
    if not n:
        return nullcontext()
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=int(n))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    with _thread_limit():
        try:
            return args.func(args)
        except SchemaError as exc:
            print(f"invalid input: {exc}", file=sys.stderr)
            return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
