"""Command-line interface.

Subcommands::

    dswlab hm solve|residual   Hastings-McLeod solution or its residual
    dswlab kdv run     KdV snapshot
    dswlab edges       leading/trailing edge trajectory
    dswlab whitham solve   Riemann invariants across the zone
    dswlab asym KIND   asymptotic curve (elliptic, smallamp, multiscale, composite)
    dswlab compare scaling|zone
    dswlab run         preset pipelines with a manifest

Exit status: 0 success, 2 configuration error, 3 solver failure,
4 failed acceptance check (``run --check``).
"""

import argparse
import json
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import scipy

from . import __version__, kernels
from .config import (ConfigError, ExperimentConfig, PRESETS, load_config, output_dir,
                     parse_config, sha256, write_gnuplot, write_table)

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_CHECK = 0, 2, 3, 4

DECISIONS = {
    "hm_right_tail": "asymptotic",
    "multiscale_order": "one_third",
    "elliptic_second_derivative": "frozen invariants",
    "zone_rule": "envelope-first-crossing/v1",
    "edge_window": "|z| <= 2",
}


def _solver_errors():
    from .kdv import KdVError
    from .painleve2 import NonConvergenceError
    from .whitham import QuadratureError, WhithamSolveError
    from .specfun import DomainError

    return (KdVError, NonConvergenceError, QuadratureError, WhithamSolveError, DomainError,
            FloatingPointError)


def _model(cfg):
    from .initial_data import load_model

    try:
        return load_model(cfg.initial_data)
    except (ValueError, OSError) as exc:
        raise ConfigError(f"initial_data: {exc}") from None


class _Writer:
    """Writes tables into the output directory and records them."""

    def __init__(self, outdir, gnuplot=False):
        self.outdir = Path(outdir)
        self.gnuplot = gnuplot
        self.files = []

    def path(self, name):
        p = Path(name)
        return p if p.is_absolute() or p.parent != Path(".") else self.outdir / p

    def table(self, name, columns, data, meta=None, title=""):
        p = write_table(self.path(name), columns, data, meta)
        self.files.append(p)
        if self.gnuplot:
            self.files.append(write_gnuplot(p, columns, title or p.stem))
        return p


# ---------------------------------------------------------------- stages

def stage_hm(w, out="hm.dat", zl=-10.0, zr=10.0, n=128, mu=0.009, tol=1e-14,
             right_tail="asymptotic", points=2001, zmin=None, zmax=None, action="solve"):
    from .painleve2 import pii_residual, solve_hastings_mcleod

    sol = solve_hastings_mcleod(zl, zr, n, mu, tol, right_tail=right_tail)
    z = np.linspace(zl if zmin is None else zmin, zr if zmax is None else zmax, points)
    meta = {"z_l": zl, "z_r": zr, "N": n, "mu": mu, "iterations": sol.iterations,
            "last_update": f"{sol.last_update:.3e}", "right_tail": right_tail}
    if action == "residual":
        return w.table(out, ["z", "residual"], [z, pii_residual(sol, z)], meta, "PII residual")
    return w.table(out, ["z", "A", "dA"], [z, sol(z), sol(z, 1)], meta, "Hastings-McLeod")


def stage_kdv(w, model, epsilon, t, L=15.0, n=0, dt=0.0, out=None):
    from .kdv import Grid1D, default_grid, kdv_solve

    grid = Grid1D(L, n) if n else default_grid(epsilon, L)
    tr = kdv_solve(model, epsilon, t, grid=grid, dt=dt or None)
    s = tr.final
    out = out or f"kdv_eps{epsilon:g}_t{t:g}.dat"
    meta = {"L": grid.L, "N": grid.N, "t": t, "epsilon": epsilon, "dt": tr.dt,
            "spectral_tail": f"{tr.meta['tail']:.3e}"}
    w.table(out, ["x", "u"], [s.x, s.values], meta, f"KdV eps={epsilon:g} t={t:g}")
    return s


def stage_edges(w, model, t0, t1, steps, out="edges.dat"):
    from .whitham import solve_leading_edge, trailing_edge

    ts = np.linspace(t0, t1, steps)
    rows = []
    for t in ts:
        e = solve_leading_edge(model, t)
        rows.append([t, e.x_minus, trailing_edge(model, t), e.u, e.v, e.u_t, e.v_t, e.c, e.phi0])
    rows = np.array(rows).T
    cols = ["t", "x_minus", "x_plus", "u", "v", "u_t", "v_t", "c", "phi0"]
    return w.table(out, cols, list(rows), {"t0": repr(t0), "t1": repr(t1)}, "edges")


def stage_whitham(w, model, t, points=401, out=None):
    from .whitham import solve_zone

    z = solve_zone(model, t, points)
    out = out or f"whitham_t{t:g}.dat"
    meta = {"t": t, "x_minus": repr(z.x_minus), "x_plus": repr(z.x_plus),
            "max_residual": f"{np.nanmax(z.residuals):.3e}"}
    return w.table(out, ["x", "beta1", "beta2", "beta3", "q"],
                   [z.x, z.beta1, z.beta2, z.beta3, z.q], meta, f"Whitham t={t:g}")


def _asym_eval(kind, model, t, eps, order="one_third"):
    from . import asymptotics as asym
    from .compare import better_zone, evaluators
    from .kdv import kdv_solve

    if kind == "elliptic":
        return lambda x: asym.elliptic_hopf_solution(model, x, t, eps)
    if kind == "smallamp":
        return lambda x: asym.small_amplitude_solution(model, x, t, eps)
    if kind == "multiscale":
        return lambda x: asym.multiscale_solution(model, x, t, eps, order)
    if kind == "composite":
        sol = kdv_solve(model, eps, t).final
        zone = better_zone(sol, *evaluators(model, t, eps), model, t)
        return lambda x: asym.composite_solution(model, x, t, eps, zone, order)
    raise ConfigError(f"unknown asymptotic kind {kind!r}")


def stage_asym(w, model, kind, t, eps, xmin, xmax, points, out=None, order="one_third"):
    f = _asym_eval(kind, model, t, eps, order)
    x = np.linspace(xmin, xmax, points)
    out = out or f"asym_{kind}_eps{eps:g}_t{t:g}.dat"
    meta = {"kind": kind, "t": t, "epsilon": eps, "order": order}
    return w.table(out, ["x", "u"], [x, f(x)], meta, f"{kind} eps={eps:g}")


def _kdv_job(args):
    model_spec, eps, t, L, n, dt = args
    from .initial_data import load_model
    from .kdv import Grid1D, default_grid, kdv_solve

    model = load_model(model_spec)
    grid = Grid1D(L, n) if n else default_grid(eps, L)
    kdv_solve(model, eps, t, grid=grid, dt=dt or None)
    return eps


def _prefetch(cfg, eps_list, t):
    """Run independent KdV solves in a worker pool so they land in the cache."""
    if cfg.jobs <= 1 or len(eps_list) < 2:
        return
    jobs = [(cfg.initial_data, e, t, cfg.L, cfg.N, cfg.dt) for e in eps_list]
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        list(pool.map(_kdv_job, jobs))


def stage_scaling(w, model, cfg, target, t, out=None):
    from .compare import TARGETS, sweep
    from .kdv import Grid1D

    if target not in TARGETS:
        raise ConfigError(f"unknown target {target!r}; choose from {', '.join(TARGETS)}")
    _prefetch(cfg, cfg.epsilons, t)
    kw = {"dt": cfg.dt or None}
    if cfg.N:
        kw["grid"] = Grid1D(cfg.L, cfg.N)
    rows, fits = sweep(model, cfg.epsilons, t, kdv_kwargs=kw)
    fit = fits[target]
    out = out or f"scaling_{target}_t{t:g}.dat"
    meta = {"target": target, "t": t, "fit_a": repr(fit.a), "fit_b": repr(fit.b),
            "fit_r": repr(fit.r), "fit_sigma_a": repr(fit.sigma_a),
            "zone_rule": DECISIONS["zone_rule"]}
    eps = [r["epsilon"] for r in rows]
    w.table(out, ["epsilon", target], [eps, [r[target] for r in rows]], meta, target)
    fit_path = w.path(Path(out).stem + "_fit.dat")
    w.table(fit_path, ["a", "b", "r", "sigma_a"], [[fit.a], [fit.b], [fit.r], [fit.sigma_a]],
            {"target": target})
    return rows, fits


def stage_zone(w, model, eps, t, out=None):
    from .compare import better_zone, evaluators
    from .kdv import kdv_solve

    sol = kdv_solve(model, eps, t).final
    z = better_zone(sol, *evaluators(model, t, eps), model, t)
    out = out or f"zone_eps{eps:g}_t{t:g}.dat"
    meta = {"rule": z.rule, "open_left": z.open_left, "open_right": z.open_right}
    w.table(out, ["epsilon", "t", "left", "right", "width"],
            [[eps], [t], [z.left], [z.right], [z.width]], meta)
    return z


def _error_curves(w, model, eps, t, name):
    from . import asymptotics as asym
    from .compare import better_zone, evaluators, edge_halfwidth
    from .kdv import kdv_solve
    from .whitham import solve_zone

    sol = kdv_solve(model, eps, t).final
    zone = solve_zone(model, t)
    ms, eh = evaluators(model, t, eps)
    bz = better_zone(sol, ms, eh, model, t)
    lo = zone.x_minus - 10 * edge_halfwidth(model, t, eps)
    x, u = sol.window(lo, zone.x_plus + 0.5)
    comp = asym.composite_solution(model, x, t, eps, bz)
    w.table(name, ["x", "kdv", "elliptic_hopf", "multiscale", "composite",
                   "err_multiscale", "err_elliptic_hopf", "err_composite"],
            [x, u, eh(x), ms(x), comp, u - ms(x), u - eh(x), u - comp],
            {"t": t, "epsilon": eps, "zone_left": repr(bz.left), "zone_right": repr(bz.right)},
            f"eps={eps:g} t={t:g}")


def run_preset(w, model, cfg):
    from .initial_data import breakup
    from .whitham import solve_leading_edge

    name = cfg.preset
    checks = {}
    if name == "hastings-mcleod":
        stage_hm(w, tol=cfg.hm_tol)
    elif name == "figure1":
        from .asymptotics import hopf_solution

        eps = cfg.epsilons[0]
        for t in cfg.times:
            s = stage_kdv(w, model, eps, t, cfg.L, cfg.N, cfg.dt)
            w.table(f"hopf_t{t:g}.dat", ["x", "u_hopf"], [s.x, hopf_solution(model, s.x, t)])
    elif name in ("figure4", "figure5"):
        eps, t = cfg.epsilons[0], cfg.times[-1]
        stage_kdv(w, model, eps, t, cfg.L, cfg.N, cfg.dt)
        _error_curves(w, model, eps, t, f"{name}_eps{eps:g}_t{t:g}.dat")
        checks["x_minus(0.4)"] = abs(solve_leading_edge(model, t).x_minus + 3.2297) < 5e-4 if t == 0.4 else True
    elif name in ("scaling", "zonewidth"):
        t = cfg.times[-1]
        target = "multiscale" if name == "scaling" else "zone-width"
        rows, fits = stage_scaling(w, model, cfg, target, t)
        f = fits[target]
        if name == "scaling":
            checks["multiscale slope"] = 0.55 <= f.a <= 0.75 and f.r > 0.99
        else:
            checks["zone-width slope"] = 0.55 <= f.a <= 0.78 and f.r > 0.99
    elif name == "breakup":
        bp = breakup(model)
        eps = cfg.epsilons[0]
        for t in cfg.times:
            if t <= bp.t_c:
                raise ConfigError(f"breakup preset needs times above t_c={bp.t_c:.6f}")
            s = stage_kdv(w, model, eps, t, cfg.L, cfg.N, cfg.dt)
            e = solve_leading_edge(model, t)
            x, u = s.window(e.x_minus - 1.0, e.x_minus + 0.5)
            from .asymptotics import multiscale_solution

            w.table(f"breakup_eps{eps:g}_t{t:g}.dat", ["x", "kdv", "multiscale"],
                    [x, u, multiscale_solution(model, x, t, eps, cfg.order)],
                    {"t": t, "epsilon": eps, "t_c": repr(bp.t_c)})
        checks["breakup point"] = abs(bp.t_c - 0.2165) < 1e-3 and abs(bp.x_c + 1.5245) < 2e-3
    else:
        raise ConfigError(f"unknown preset {name!r}")
    return checks


def write_manifest(w, cfg, argv, t_wall, checks):
    cfg_path = w.outdir / "config.txt"
    cfg_path.write_text(cfg.dumps())
    manifest = {
        "command": argv,
        "config_file": cfg_path.name,
        "config": cfg.as_dict(),
        "versions": {"dswlab": __version__, "python": platform.python_version(),
                     "numpy": np.__version__, "scipy": scipy.__version__,
                     "kernels": kernels.BACKEND},
        "decisions": dict(DECISIONS, multiscale_order=cfg.order),
        "wall_time_s": round(t_wall, 3),
        "checks": checks,
        "outputs": [{"file": str(p.relative_to(w.outdir)) if p.is_relative_to(w.outdir) else str(p),
                     "sha256": sha256(p)} for p in w.files],
    }
    path = w.outdir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, default=str) + "\n")
    return path


# ---------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(prog="dswlab", description=__doc__.split("\n")[0])
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--outdir", help="output directory (DSWLAB_OUTDIR overrides the default)")
    p.add_argument("--gnuplot", action="store_true", help="write companion gnuplot scripts")
    p.add_argument("--initial-data", dest="initial_data", help="sech2 or file:<path>")
    sub = p.add_subparsers(dest="command", required=True)

    h = sub.add_parser("hm", help="Hastings-McLeod solution")
    h.add_argument("action", choices=["solve", "residual"])
    h.add_argument("--zl", type=float, default=-10.0)
    h.add_argument("--zr", type=float, default=10.0)
    h.add_argument("--n", type=int, default=128)
    h.add_argument("--mu", type=float, default=0.009)
    h.add_argument("--tol", type=float, default=1e-14)
    h.add_argument("--right-tail", choices=["asymptotic", "airy"], default="asymptotic")
    h.add_argument("--points", type=int, default=2001)
    h.add_argument("--out", default="hm.dat")

    k = sub.add_parser("kdv", help="KdV solver")
    ks = k.add_subparsers(dest="action", required=True)
    kr = ks.add_parser("run")
    kr.add_argument("--epsilon", type=float, required=True)
    kr.add_argument("--t", type=float, required=True)
    kr.add_argument("--L", type=float, default=15.0)
    kr.add_argument("--n", type=int, default=0, help="grid size (0: default for eps)")
    kr.add_argument("--dt", type=float, default=0.0)
    kr.add_argument("--out")

    e = sub.add_parser("edges", help="edge trajectories")
    e.add_argument("--t0", type=float, required=True)
    e.add_argument("--t1", type=float, required=True)
    e.add_argument("--steps", type=int, default=20)
    e.add_argument("--out", default="edges.dat")

    wh = sub.add_parser("whitham", help="Whitham zone")
    ws = wh.add_subparsers(dest="action", required=True)
    wsv = ws.add_parser("solve")
    wsv.add_argument("--t", type=float, required=True)
    wsv.add_argument("--points", type=int, default=401)
    wsv.add_argument("--out")

    a = sub.add_parser("asym", help="asymptotic solutions")
    a.add_argument("kind", choices=["elliptic", "smallamp", "multiscale", "composite"])
    a.add_argument("--t", type=float, required=True)
    a.add_argument("--epsilon", type=float, required=True)
    a.add_argument("--xmin", type=float, required=True)
    a.add_argument("--xmax", type=float, required=True)
    a.add_argument("--points", type=int, default=2001)
    a.add_argument("--order", choices=["one_third", "two_thirds"], default="one_third")
    a.add_argument("--out")

    c = sub.add_parser("compare", help="error scaling and multiscale zone")
    cs = c.add_subparsers(dest="action", required=True)
    sc = cs.add_parser("scaling")
    sc.add_argument("--epsilons", help="comma-separated list")
    sc.add_argument("--t", type=float, default=0.4)
    sc.add_argument("--target", required=True,
                    choices=["multiscale", "elliptic-edge", "elliptic-interior", "zone-width",
                             "composite-edge"])
    sc.add_argument("--jobs", type=int)
    sc.add_argument("--out")
    zc = cs.add_parser("zone")
    zc.add_argument("--epsilon", type=float, required=True)
    zc.add_argument("--t", type=float, default=0.4)
    zc.add_argument("--out")

    r = sub.add_parser("run", help="run a preset pipeline")
    r.add_argument("--preset", choices=sorted(PRESETS))
    r.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a configuration key")
    r.add_argument("--check", action="store_true", help="exit 4 if the preset's checks fail")
    return p


def _config(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = list(getattr(args, "set", []) or [])
    if getattr(args, "preset", None):
        overrides.insert(0, f"preset={args.preset}")
    if args.initial_data:
        overrides.append(f"initial_data={args.initial_data}")
    if getattr(args, "epsilons", None):
        overrides.append(f"epsilons={args.epsilons}")
    if getattr(args, "jobs", None):
        overrides.append(f"jobs={args.jobs}")
    if overrides:
        cfg = parse_config("\n".join(overrides), source="command line", base=cfg)
    return cfg


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    t0 = time.time()
    try:
        cfg = _config(args)
        w = _Writer(output_dir(args.outdir or cfg.outdir), args.gnuplot)
        model = _model(cfg)
        checks = {}
        cmd = args.command
        if cmd == "hm":
            stage_hm(w, args.out, args.zl, args.zr, args.n, args.mu, args.tol, args.right_tail,
                     args.points, action=args.action)
        elif cmd == "kdv":
            stage_kdv(w, model, args.epsilon, args.t, args.L, args.n, args.dt, args.out)
        elif cmd == "edges":
            stage_edges(w, model, args.t0, args.t1, args.steps, args.out)
        elif cmd == "whitham":
            stage_whitham(w, model, args.t, args.points, args.out)
        elif cmd == "asym":
            stage_asym(w, model, args.kind, args.t, args.epsilon, args.xmin, args.xmax,
                       args.points, args.out, args.order)
        elif cmd == "compare" and args.action == "scaling":
            stage_scaling(w, model, cfg, args.target, args.t, args.out)
        elif cmd == "compare":
            stage_zone(w, model, args.epsilon, args.t, args.out)
        elif cmd == "run":
            if not cfg.preset:
                raise ConfigError("run needs --preset or a preset key in the config")
            checks = run_preset(w, model, cfg)
        write_manifest(w, cfg, ["dswlab"] + argv, time.time() - t0, checks)
    except ConfigError as exc:
        print(f"dswlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _solver_errors() as exc:
        print(f"dswlab: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"dswlab: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "run" and args.check:
        failed = [k for k, ok in checks.items() if not ok]
        for k, ok in checks.items():
            print(f"{'PASS' if ok else 'FAIL'} {k}")
        if failed:
            return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
