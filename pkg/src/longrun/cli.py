"""Command-line front end.

Each subcommand computes one table and writes it as CSV (default) or
JSON with a provenance header: command, parameters, seed, jobs,
backend, package version, schema version.  Nothing time-dependent goes
into the output, so rerunning the same config (same seed, same flags)
reproduces the bytes exactly.

Exit codes: 0 success, 2 usage error, 3 numeric failure.
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, continuum, lattice, thermo, vdw
from ._kernels import BACKEND
from .errors import (
    ConvergenceError,
    NoCoexistenceError,
    NoTransitionError,
    ParameterError,
    SizeLimitError,
)
from .process import ModelParams, mc_mean
from .sweeps import SweepTable, parse_grid, parse_int_list, write_csv, write_json


def _opt(args, cfg, key, default=None, required=False):
    """Option resolution: explicit flag, then config file, then default."""
    val = getattr(args, key.replace("-", "_"), None)
    if val is None:
        val = cfg.get(key, default)
    if val is None and required:
        raise ParameterError(f"missing required option --{key}")
    return val


def _parallel_map(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _meta(command, params, jobs):
    return {
        "command": command,
        "params": dict(sorted(params.items())),
        "jobs": jobs,
        "version": __version__,
        "backend": BACKEND,
    }


def cmd_lyapunov(args, cfg, jobs):
    rho_list = parse_grid(str(_opt(args, cfg, "rho", required=True)))
    t_grid = parse_grid(str(_opt(args, cfg, "T", required=True)))
    n_raw = _opt(args, cfg, "n")
    n_list = parse_int_list(str(n_raw)) if n_raw is not None else []

    cols = ["rho", "T", "lambda_exact", "lambda_vdw"]
    cols += [f"lambda_n{n}" for n in n_list]

    def one(point):
        r, T = point
        row = [r, T, thermo.lyapunov(r, T), vdw.vdw_lyapunov(r, T)]
        row += [lattice.finite_lyapunov_at(r, T, n) for n in n_list]
        return tuple(row)

    tasks = [(r, T) for r in rho_list for T in t_grid]
    rows = _parallel_map(one, tasks, jobs)
    params = {"rho": _opt(args, cfg, "rho"), "T": _opt(args, cfg, "T")}
    if n_raw is not None:
        params["n"] = n_raw
    return [(SweepTable(cols, rows, _meta("lyapunov", params, jobs)), None)]


_ISOTHERM_COLS = [
    "d", "T", "pi", "f", "p", "g", "mu", "rho", "two_phase", "p0", "rho0",
    "vdw_p", "vdw_rho", "lattice_p", "lattice_rho",
]


def cmd_isotherm(args, cfg, jobs):
    T = float(_opt(args, cfg, "T", required=True))
    grid = parse_grid(str(_opt(args, cfg, "grid", default="0.02:0.98:97")))
    n = int(_opt(args, cfg, "n", default=200))
    pts = thermo.isotherm(T, grid)
    d_lat, p_lat, rho_lat = lattice.finite_isotherm(n, T)
    lat_p = np.interp(grid, d_lat, p_lat)
    lat_rho = np.interp(grid, d_lat, rho_lat)
    rows = []
    for pt, lp, lr in zip(pts, lat_p, lat_rho):
        rows.append((
            pt.d, pt.T, pt.pi, pt.f, pt.p, pt.g, pt.mu, pt.rho,
            pt.two_phase, pt.p0, pt.rho0,
            vdw.vdw_pressure(pt.d, T), vdw.vdw_fugacity(pt.d, T), lp, lr,
        ))
    params = {
        "T": T,
        "grid": _opt(args, cfg, "grid", default="0.02:0.98:97"),
        "n": n,
    }
    return [(SweepTable(_ISOTHERM_COLS, rows, _meta("isotherm", params, jobs)), None)]


def cmd_phase_diagram(args, cfg, jobs):
    t_grid = parse_grid(str(_opt(args, cfg, "T", required=True)))
    tc = thermo.critical_point().T_C
    nan = math.nan

    def one(T):
        vdw_rho0 = math.exp(-1.0 / (3.0 * T)) if T < vdw.VDW_T_C else nan
        if T >= tc:
            return (T, nan, nan, nan, nan, vdw_rho0, "supercritical")
        try:
            rec = thermo.maxwell(T)
        except NoCoexistenceError:
            return (T, nan, nan, nan, nan, vdw_rho0, "no-coexistence")
        return (T, rec.d_g, rec.d_ell, rec.p0, rec.rho0, vdw_rho0, "")

    rows = _parallel_map(one, t_grid, jobs)
    cols = ["T", "d_g", "d_ell", "p0", "rho0", "vdw_rho0", "note"]
    params = {"T": _opt(args, cfg, "T")}
    return [(SweepTable(cols, rows, _meta("phase-diagram", params, jobs)), None)]


def cmd_critical(args, cfg, jobs):
    init_raw = _opt(args, cfg, "initial")
    initial = None
    if init_raw is not None:
        parts = str(init_raw).split(",")
        if len(parts) != 2:
            raise ParameterError(f"--initial wants 'T,d', got {init_raw!r}")
        initial = (float(parts[0]), float(parts[1]))
    cp = thermo.critical_point(initial)
    vc = vdw.vdw_critical_point()
    cols = ["system", "T_C", "d_C", "rho_C"]
    rows = [
        ("exact", cp.T_C, cp.d_C, cp.rho_C),
        ("vdw", vc.T_C, vc.d_C, vc.rho_C),
    ]
    params = {} if init_raw is None else {"initial": init_raw}
    return [(SweepTable(cols, rows, _meta("critical", params, jobs)), None)]


_SIMULATE_COLS = [
    "rho", "n", "sigma", "tau", "T", "paths",
    "mc_estimate", "mc_std_error", "mc_log_mean",
    "exact_log_mean", "brute_log_mean",
    "kurtosis", "heavy_tailed", "num_overflow_paths",
]


def cmd_simulate(args, cfg, jobs):
    rho_list = parse_grid(str(_opt(args, cfg, "rho", required=True)))
    n_list = parse_int_list(str(_opt(args, cfg, "n", required=True)))
    t_raw = _opt(args, cfg, "T")
    sig_raw = _opt(args, cfg, "sigma")
    tau_raw = _opt(args, cfg, "tau")
    if t_raw is not None and (sig_raw is not None or tau_raw is not None):
        raise ParameterError("give either --T or --sigma/--tau, not both")
    if t_raw is None and (sig_raw is None or tau_raw is None):
        raise ParameterError("need --T or both --sigma and --tau")
    paths = int(_opt(args, cfg, "paths", default=100000))
    seed = int(_opt(args, cfg, "seed", required=True))
    x0 = float(_opt(args, cfg, "x0", default=1.0))

    plist = []
    if t_raw is not None:
        for r in rho_list:
            for n in n_list:
                for T in parse_grid(str(t_raw)):
                    plist.append(ModelParams.from_temperature(r, T, n, x0=x0))
    else:
        for r in rho_list:
            for n in n_list:
                plist.append(
                    ModelParams(rho=r, sigma=float(sig_raw), tau=float(tau_raw),
                                n=n, x0=x0)
                )
    # one independent substream per row, assigned by row position so the
    # result does not depend on --jobs
    row_seeds = np.random.SeedSequence(seed).generate_state(len(plist), dtype=np.uint64)

    def one(i):
        p = plist[i]
        mc = mc_mean(p, paths, int(row_seeds[i]))
        ex = lattice.exact_mean(p)
        br = lattice.brute_mean(p) if p.n <= 16 else math.nan
        return (
            p.rho, p.n, p.sigma, p.tau, p.temperature, paths,
            mc.estimate, mc.std_error, mc.log_mean, ex, br,
            mc.kurtosis, mc.heavy_tailed, mc.num_overflow_paths,
        )

    rows = _parallel_map(one, list(range(len(plist))), jobs)
    params = {"rho": _opt(args, cfg, "rho"), "n": _opt(args, cfg, "n"),
              "paths": paths, "seed": seed, "x0": x0}
    if t_raw is not None:
        params["T"] = t_raw
    else:
        params["sigma"] = sig_raw
        params["tau"] = tau_raw
    return [(SweepTable(_SIMULATE_COLS, rows, _meta("simulate", params, jobs)), None)]


_CONTINUUM_COLS = [
    "r", "sigma", "t", "dt", "paths",
    "mean_A", "se_A", "median_A", "ks_stationary", "ks_aux", "ks_y",
]


def cmd_continuum(args, cfg, jobs):
    r = float(_opt(args, cfg, "r", default=1.0))
    sigma = float(_opt(args, cfg, "sigma", required=True))
    t = float(_opt(args, cfg, "t", required=True))
    dt = float(_opt(args, cfg, "dt", required=True))
    paths = int(_opt(args, cfg, "paths", default=100000))
    seed = int(_opt(args, cfg, "seed", required=True))
    density_out = _opt(args, cfg, "density-out")

    p = continuum.ContinuumParams(r=r, sigma=sigma, t=t, dt=dt)
    sub = np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)
    A = continuum.simulate_integral_gbm(p, paths, int(sub[0]))
    X = continuum.simulate_linear_sde(p, paths, int(sub[1]))
    with np.errstate(over="ignore"):
        Y = np.exp(r * A)

    ks_stat = continuum.ks_distance(A, lambda z: continuum.stationary_cdf_A(z, sigma))
    ks_aux = continuum.ks_two_sample(A, X)
    ks_y = continuum.ks_distance(Y, lambda y: continuum.stationary_cdf_y(y, r, sigma))
    se = float(A.std(ddof=1) / math.sqrt(A.size))
    row = (r, sigma, t, dt, paths,
           float(A.mean()), se, float(np.median(A)), ks_stat, ks_aux, ks_y)
    params = {"r": r, "sigma": sigma, "t": t, "dt": dt,
              "paths": paths, "seed": seed}
    meta = _meta("continuum", params, jobs)
    out = [(SweepTable(_CONTINUUM_COLS, [row], meta), None)]

    if density_out is not None:
        scale = 2.0 / (sigma * sigma)
        z = np.geomspace(scale / 50.0, scale * 200.0, 256)
        ly = np.minimum(r * z, 600.0)
        y = np.exp(ly)
        dens_rows = [
            (
                float(zi),
                float(continuum.stationary_density_A(zi, sigma)),
                float(continuum.stationary_cdf_A(zi, sigma)),
                float(yi),
                float(continuum.stationary_density_y(yi, r, sigma)),
                float(continuum.stationary_cdf_y(yi, r, sigma)),
            )
            for zi, yi in zip(z, y)
        ]
        dens_cols = ["z", "density_A", "cdf_A", "y", "density_y", "cdf_y"]
        dens_meta = dict(meta, table="density")
        out.append((SweepTable(dens_cols, dens_rows, dens_meta), str(density_out)))
    return out


def _verify_checks():
    """The invariant suite behind the verify subcommand.

    Each check is small enough to run in seconds; the heavy versions
    with full grids live in the test suite.
    """

    def vdw_critical():
        c = vdw.vdw_critical_point()
        worst = max(abs(c.T_C - 1 / 6), abs(c.d_C - 0.5),
                    abs(c.rho_C - math.exp(-2)))
        return None if worst < 1e-10 else f"worst deviation {worst:.2e}"

    def spectrum():
        for n in range(2, 9):
            for N in range(n):
                if not lattice.verify_spectrum(n, N):
                    return f"mismatch at n={n} N={N}"
        return None

    def brute():
        worst = 0.0
        for n in (3, 8, 12):
            for rho in (0.1, 0.5):
                for c2 in (0.1, 1.0):
                    p = ModelParams(rho=rho, sigma=math.sqrt(c2), tau=1.0, n=n)
                    worst = max(worst, abs(lattice.exact_mean(p) - lattice.brute_mean(p)))
        return None if worst < 1e-12 else f"log-mean deviation {worst:.2e}"

    def mc():
        p = ModelParams.from_temperature(0.1, 1.0, 10)
        res = mc_mean(p, 20000, seed=12345)
        dev = abs(res.estimate - math.exp(lattice.exact_mean(p)))
        return None if dev <= 4 * res.std_error else f"{dev / res.std_error:.1f} SE"

    def high_t():
        lam = thermo.lyapunov(0.05, 100.0)
        rel = abs(lam - math.log(1.05)) / math.log(1.05)
        return None if rel < 0.01 else f"relative error {rel:.2e}"

    def low_t_vdw():
        lam = vdw.vdw_lyapunov(0.05, 0.02)
        dev = abs(lam - (math.log(0.05) + 1.0 / 0.06))
        return None if dev < 1e-8 else f"deviation {dev:.2e}"

    def maxwell():
        rec = thermo.maxwell(0.12)
        fug = abs(thermo.fugacity(rec.d_g, 0.12) - thermo.fugacity(rec.d_ell, 0.12))
        if fug / rec.rho0 >= 1e-6:
            return f"fugacity mismatch {fug / rec.rho0:.2e}"
        res = abs(thermo.chemical_potential(rec.d_g, 0.12, check=False)
                  - thermo.chemical_potential(rec.d_ell, 0.12, check=False))
        return None if res < 1e-9 else f"equal-area residual {res:.2e}"

    def bounds():
        for d in (0.1, 0.3, 0.5, 0.7, 0.9):
            for T in (0.1, 1.0, 10.0):
                pi = thermo.solve_pi(d, T)
                if pi <= thermo.pi_lower_bound(d, T):
                    return f"pi bound violated at d={d} T={T}"
                if thermo.free_energy(d, T) > vdw.vdw_free_energy(d, T) + 1e-12:
                    return f"f bound violated at d={d} T={T}"
        return None

    def finite_size():
        lam = thermo.lyapunov(0.025, 0.3)
        errs = [abs(lattice.finite_lyapunov_at(0.025, 0.3, n) - lam)
                for n in (40, 100, 200)]
        if not errs[0] > errs[1] > errs[2]:
            return f"errors not decreasing: {errs}"
        rel = errs[2] / abs(lam)
        return None if rel < 0.05 else f"n=200 off by {rel:.2%}"

    def continuum_ks():
        p = continuum.ContinuumParams(r=1.0, sigma=1.5, t=30.0, dt=0.01)
        A = continuum.simulate_integral_gbm(p, 20000, seed=777)
        ks = continuum.ks_distance(
            A, lambda z: continuum.stationary_cdf_A(z, 1.5))
        return None if ks < 0.05 else f"KS {ks:.3f}"

    def backends():
        from ._kernels import fallback

        try:
            from ._kernels import _core
        except ImportError:
            return None  # pure-python build; nothing to compare
        log_z_a = fallback.log_canonical_vector(50, 2.0)
        log_z_b = _core.log_canonical_vector(50, 2.0)
        worst = float(np.max(np.abs(np.asarray(log_z_a) - np.asarray(log_z_b))))
        rng = np.random.default_rng(3)
        dw = rng.standard_normal((8, 64)) * 0.1
        outs = []
        for mod in (fallback, _core):
            w = np.zeros(8)
            g = np.ones(8)
            acc = np.zeros(8)
            mod.gbm_trapezoid_chunk(w, g, acc, dw.copy(), 0.7, 0.0, 0.01)
            outs.append(acc.copy())
        worst = max(worst, float(np.max(np.abs(outs[0] - outs[1]))))
        return None if worst < 1e-10 else f"backend deviation {worst:.2e}"

    return [
        ("vdw-critical-constants", vdw_critical),
        ("spectrum-small-n", spectrum),
        ("exact-vs-brute", brute),
        ("mc-vs-exact", mc),
        ("high-T-lyapunov", high_t),
        ("low-T-vdw-asymptote", low_t_vdw),
        ("maxwell-consistency", maxwell),
        ("eos-bounds", bounds),
        ("finite-size-approach", finite_size),
        ("continuum-stationarity", continuum_ks),
        ("kernel-backend-agreement", backends),
    ]


def cmd_verify(args, cfg, jobs):
    failures = 0
    for name, check in _verify_checks():
        try:
            detail = check()
        except Exception as exc:  # a crash is a failure, not an abort
            detail = repr(exc)
        if detail is None:
            print(f"PASS {name}")
        else:
            print(f"FAIL {name}: {detail}")
            failures += 1
    return 3 if failures else 0


_HANDLERS = {
    "lyapunov": cmd_lyapunov,
    "isotherm": cmd_isotherm,
    "phase-diagram": cmd_phase_diagram,
    "critical": cmd_critical,
    "simulate": cmd_simulate,
    "continuum": cmd_continuum,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file mirroring the flags; flags win")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--out", help="output path (default stdout); relative paths "
                        "resolve against $LONGRUN_OUTDIR when set")
    common.add_argument("--jobs", type=int, default=None,
                        help="parallel workers (default: cpu count)")

    p = argparse.ArgumentParser(
        prog="longrun",
        description="Growth rates of multiplicative random processes: exact "
        "finite-n, thermodynamic limit, van der Waals approximation, and the "
        "continuous-time integral of geometric Brownian motion.",
    )
    p.add_argument("--version", action="version", version=f"longrun {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("lyapunov", parents=[common],
                       help="growth rate vs temperature, all three routes")
    q.add_argument("--rho", help="fugacity grid or comma list")
    q.add_argument("--T", help="temperature grid start:stop:count")
    q.add_argument("--n", help="comma list of finite sizes (optional)")

    q = sub.add_parser("isotherm", parents=[common],
                       help="equation of state along one isotherm")
    q.add_argument("--T", help="temperature")
    q.add_argument("--grid", help="density grid (default 0.02:0.98:97)")
    q.add_argument("--n", help="finite size for the lattice overlay (default 200)")

    q = sub.add_parser("phase-diagram", parents=[common],
                       help="coexistence curve over a temperature grid")
    q.add_argument("--T", help="temperature grid")

    q = sub.add_parser("critical", parents=[common],
                       help="critical point, exact and van der Waals")
    q.add_argument("--initial", help="Newton start 'T,d' (optional)")

    q = sub.add_parser("simulate", parents=[common],
                       help="Monte Carlo vs exact finite-n means")
    q.add_argument("--rho")
    q.add_argument("--n", help="comma list of chain lengths")
    q.add_argument("--T", help="temperature grid (alternative to --sigma/--tau)")
    q.add_argument("--sigma")
    q.add_argument("--tau")
    q.add_argument("--paths")
    q.add_argument("--seed")
    q.add_argument("--x0")

    q = sub.add_parser("continuum", parents=[common],
                       help="integrated geometric Brownian motion statistics")
    q.add_argument("--r")
    q.add_argument("--sigma")
    q.add_argument("--t")
    q.add_argument("--dt")
    q.add_argument("--paths")
    q.add_argument("--seed")
    q.add_argument("--density-out", help="also dump stationary density tables here")

    sub.add_parser("verify", parents=[common],
                   help="run the invariant suite, print pass/fail per property")
    return p


def _write_table(table, dest, fmt, default_out):
    path = dest if dest is not None else default_out
    if path is None:
        if fmt == "json":
            write_json(table, sys.stdout)
        else:
            write_csv(table, sys.stdout)
        return
    outdir = os.environ.get("LONGRUN_OUTDIR")
    if outdir and not os.path.isabs(path):
        path = os.path.join(outdir, path)
    with open(path, "w", newline="") as fh:
        if fmt == "json":
            write_json(table, fh)
        else:
            write_csv(table, fh)


def main(argv=None):
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)

    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"usage error: cannot read --config: {exc}", file=sys.stderr)
            return 2
        if not isinstance(cfg, dict):
            print("usage error: --config must hold a JSON object", file=sys.stderr)
            return 2

    try:
        jobs = int(_opt(args, cfg, "jobs", default=os.cpu_count() or 1))
        if jobs < 1:
            raise ParameterError(f"--jobs must be >= 1, got {jobs}")
        fmt = str(_opt(args, cfg, "format", default="csv"))
        if fmt not in ("csv", "json"):
            raise ParameterError(f"--format must be csv or json, got {fmt!r}")
        default_out = _opt(args, cfg, "out")

        if args.command == "verify":
            return cmd_verify(args, cfg, jobs)
        tables = _HANDLERS[args.command](args, cfg, jobs)
        for table, dest in tables:
            _write_table(table, dest, fmt, default_out)
    except (ParameterError, SizeLimitError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, NoCoexistenceError, NoTransitionError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
