"""Command-line entry point: experiment orchestration and run manifests.

Every subcommand writes its CSV/JSON outputs plus a manifest.json listing the
produced files with content digests and the embedded pass/fail checks.  Exit
codes: 0 all checks passed, 1 an experiment check failed, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, exports
from .config import EXPERIMENTS, RunConfig, load_config, parse_schedule
from .elliptic import SolveOptions, continuation, default_alpha_grid, shooting_scan, symmetric_solution
from .errors import AclabError, ConfigError, ExperimentFailed
from .field import QUARTIC, ac_residual, sigma_energy
from .geometry import SphereMetric, cap_comparison, curvature_report, slice_area, unit_sphere_area
from .minmax import least_area_scan, sweepout_profile, width_report
from .parabolic import FlowOptions, drift_experiment, frankel_experiment, perturb_by_eigenfunction
from .cylinder import critical_points
from .spectral import jacobi_spectrum_slice, linearized_spectrum

__all__ = ["main", "run", "RunManifest"]


@dataclasses.dataclass
class Check:
    name: str
    passed: bool
    measured: float | int | bool
    required: str


@dataclasses.dataclass
class RunManifest:
    experiment: str
    config: dict
    version: str
    wall_time_s: float
    files: list
    checks: list

    @property
    def all_passed(self):
        return all(c.passed for c in self.checks)


def _metric_of(cfg):
    return SphereMetric(n=cfg.n, r=cfg.r, N=cfg.grid_N)


def _solve_opts(metric):
    # keep the Newton target above the rounding floor ~4e-16/h^2 of the residual
    return SolveOptions(tolerance=max(1e-12, 5e-15 / (metric.h * metric.h)))


def _exp_metric(cfg, out):
    m = _metric_of(cfg)
    rep = curvature_report(m)
    files = [exports.write_warp_csv(out / "warp.csv", m)]
    files.append(exports.write_curvature_csv(out / "curvature.csv", m, rep))
    sym = float(np.max(np.abs(m.w - m.w[::-1])))
    checks = [
        Check("ricci_radial_min", rep.ricci_radial.min() >= -1e-9, float(rep.ricci_radial.min()), ">= -1e-9"),
        Check("ricci_tangential_min", rep.ricci_tangential.min() >= -1e-9, float(rep.ricci_tangential.min()), ">= -1e-9"),
        Check("scalar_min", rep.scalar.min() >= -1e-9, float(rep.scalar.min()), ">= -1e-9"),
        Check("reflection_symmetry", sym <= 1e-14, sym, "<= 1e-14"),
    ]
    return files, checks


def _exp_curvature(cfg, out):
    m = _metric_of(cfg)
    rep = curvature_report(m)
    files = [exports.write_curvature_csv(out / "curvature.csv", m, rep)]
    pole_gap = abs(rep.ricci_radial[0] - rep.ricci_tangential[0])
    checks = [
        Check("ricci_radial_min", rep.ricci_radial.min() >= -1e-9, float(rep.ricci_radial.min()), ">= -1e-9"),
        Check("ricci_tangential_min", rep.ricci_tangential.min() >= -1e-9, float(rep.ricci_tangential.min()), ">= -1e-9"),
        Check("pole_isotropy", pole_gap <= 1e-6, pole_gap, "<= 1e-6"),
    ]
    return files, checks


def _exp_cap(cfg, out):
    min_f, f_end, b, f = cap_comparison(2048)
    files = [exports.write_cap_csv(out / "cap_comparison.csv", b, f)]
    checks = [
        Check("cap_min_f", min_f >= -1e-12, min_f, ">= -1e-12"),
        Check("cap_f_end", abs(f_end) <= 1e-12, f_end, "|.| <= 1e-12"),
    ]
    return files, checks


def _exp_solve(cfg, out):
    m = _metric_of(cfg)
    opts = _solve_opts(m)
    schedule = cfg.epsilon_schedule if cfg.epsilon_schedule is not None else (cfg.epsilon,)
    records = continuation(m, schedule, opts)
    files = []
    entries = []
    checks = []
    for rec in records:
        eps = rec.profile.eps
        name = f"solution_eps{eps:g}.csv"
        files.append(exports.write_profile_csv(out / name, rec.profile))
        anti = float(np.max(np.abs(rec.profile.values + rec.profile.values[::-1])))
        zero_err = abs(rec.zeros[0] - m.s_c) if rec.zeros else float("nan")
        entries.append(
            {
                "eps": eps,
                "energy": rec.energy,
                "residual_norm": rec.residual_norm,
                "zeros": rec.zeros,
                "antisymmetry_defect": anti,
                "profile_csv": name,
            }
        )
        checks.append(Check(f"residual_eps{eps:g}", rec.residual_norm <= opts.tolerance, rec.residual_norm, f"<= {opts.tolerance:g}"))
        checks.append(Check(f"zero_at_center_eps{eps:g}", zero_err <= m.h, zero_err, "<= h"))
        checks.append(Check(f"antisymmetry_eps{eps:g}", anti <= 1e-8, anti, "<= 1e-8"))
    files.insert(0, exports.write_json(out / "solutions.json", entries))
    return files, checks


def _exp_census(cfg, out):
    m = _metric_of(cfg)
    opts = _solve_opts(m)
    blowups = []
    census = shooting_scan(m, cfg.epsilon, default_alpha_grid(400), opts, blowups=blowups)
    files = exports.write_census(out, census)
    files.append(exports.write_json(out / "census_blowups.json", blowups))
    sym_ok = True
    worst = 0.0
    for rec in census:
        zeros = rec.zeros
        for z in zeros:
            mirror = 2.0 * m.s_c - z
            gap = min(abs(z - m.s_c), min(abs(mirror - z2) for z2 in zeros))
            worst = max(worst, gap)
            if gap > 2.0 * m.h:
                sym_ok = False
    checks = [
        Check("census_nonempty", len(census) > 0, len(census), "> 0"),
        Check("census_zeros_symmetric", sym_ok, worst, "pairs within 2h"),
    ]
    return files, checks


def _exp_frankel(cfg, out):
    m = _metric_of(cfg)
    opts = _solve_opts(m)
    rec = symmetric_solution(m, cfg.epsilon, opts)
    u0 = perturb_by_eigenfunction(rec, 0.5)
    sub_min = float(ac_residual(u0).min())
    trace = frankel_experiment(m, cfg.epsilon, FlowOptions(), record=rec)
    files = [exports.write_trace_csv(out / "frankel_trace.csv", trace)]
    checks = [
        Check("subsolution_min_residual", sub_min >= -1e-10, sub_min, ">= -1e-10"),
        Check("flow_monotone", trace.global_min_increment >= -1e-10, trace.global_min_increment, ">= -1e-10"),
    ]
    return files, checks


def _exp_drift(cfg, out):
    m = _metric_of(cfg)
    offset = 0.3 * cfg.r
    trace = drift_experiment(m, cfg.epsilon, offset)
    files = [exports.write_trace_csv(out / "drift_trace.csv", trace)]
    de = np.diff(trace.energy)
    strides = np.diff(trace.times) / (cfg.epsilon**2 / 4.0)
    dissipative = bool(np.all(de <= 1e-10 * np.maximum(strides, 1.0)))
    final = trace.interface_s[-1]
    reduced = bool(abs(final - m.s_c) < abs(offset)) if np.isfinite(final) else False
    files.append(
        exports.write_json(
            out / "drift_report.json",
            {
                "offset": offset,
                "initial_distance": abs(offset),
                "final_distance": abs(final - m.s_c) if np.isfinite(final) else None,
                "distance_reduced": reduced,
                "interface_lost": trace.interface_lost,
            },
        )
    )
    checks = [Check("flow_dissipative", dissipative, float(de.max()), "<= 1e-10 per step")]
    return files, checks


def _exp_spectrum(cfg, out):
    m = _metric_of(cfg)
    opts = _solve_opts(m)
    rec = symmetric_solution(m, cfg.epsilon, opts)
    rep = linearized_spectrum(rec.profile, k_max=6, m=4)
    files = [exports.write_spectral_json(out / "spectrum.json", rep)]
    checks = [
        Check("index", rep.index == 1, rep.index, "== 1"),
        Check("nullity", rep.nullity == 0, rep.nullity, "== 0"),
    ]
    return files, checks


def _exp_jacobi(cfg, out):
    m = _metric_of(cfg)
    lo, hi = m.plateau
    files = []
    checks = []
    for tag, s in (("center", m.s_c), ("edge_lo", lo), ("edge_hi", hi)):
        rep = jacobi_spectrum_slice(m, s, k_max=8)
        files.append(exports.write_jacobi_json(out / f"jacobi_{tag}.json", rep))
        second = rep.entries[1][1]
        checks.append(Check(f"jacobi_{tag}_stable", rep.index == 0 and rep.nullity == 1, rep.index, "index 0, nullity 1"))
        checks.append(Check(f"jacobi_{tag}_second", second == float(m.n - 1), second, f"== {m.n - 1}"))
    return files, checks


def _exp_width(cfg, out):
    m = _metric_of(cfg)
    opts = _solve_opts(m)
    records = continuation(m, cfg.schedule_or_default, opts)
    energies = [(rec.profile.eps, rec.energy) for rec in records]
    prof = sweepout_profile(m, 257)
    rep = width_report(m, energies, samples=257)
    files = [
        exports.write_sweepout_csv(out / "sweepout.csv", prof),
        exports.write_width_json(out / "width.json", rep),
    ]
    vol = unit_sphere_area(m.n)
    cell = m.L / 256
    lo, hi = m.plateau
    arg_ok = abs(rep.plateau[0] - lo) <= cell and abs(rep.plateau[1] - hi) <= cell
    checks = [
        Check("max_mass", abs(prof.max_mass - vol) <= 1e-10, prof.max_mass, "== vol(S^(n-1)) +- 1e-10"),
        Check("argmax_is_plateau", arg_ok, rep.plateau[0], "within one cell"),
    ]
    return files, checks


def _exp_cylinder(cfg, out):
    pts = critical_points((0.05, 0.8), 1e-5)
    files = [exports.write_cylinder_csv(out / "cylinder_critical_points.csv", pts)]
    ts = [p.t for p in pts]
    decreasing = all(b < a for a, b in zip(ts, ts[1:]))
    from .cylinder import slice_minimality_check

    worst = max(slice_minimality_check(t) for t in ts)
    checks = [
        Check("strictly_decreasing", decreasing, len(ts), "t_i strictly decreasing"),
        Check("critical_residual", worst <= 1e-10, worst, "<= 1e-10"),
    ]
    return files, checks


_RUNNERS = {
    "metric": _exp_metric,
    "curvature": _exp_curvature,
    "cap-compare": _exp_cap,
    "solve": _exp_solve,
    "census": _exp_census,
    "flow-frankel": _exp_frankel,
    "flow-drift": _exp_drift,
    "spectrum": _exp_spectrum,
    "jacobi": _exp_jacobi,
    "width": _exp_width,
    "example-cylinder": _exp_cylinder,
}


def run(experiment, cfg):
    """Execute one experiment (or `all`) and write manifest.json to out_dir."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    cfg.validate()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    names = [e for e in EXPERIMENTS if e != "all"] if experiment == "all" else [experiment]
    files = []
    checks = []
    for name in names:
        f, c = _RUNNERS[name](cfg, out)
        files.extend(f)
        checks.extend(c)
    wall = time.perf_counter() - t0
    manifest = RunManifest(
        experiment=experiment,
        config={
            "n": cfg.n,
            "R_minus_a": cfg.r,
            "grid_N": cfg.grid_N,
            "epsilon": cfg.epsilon,
            "epsilon_schedule": list(cfg.epsilon_schedule) if cfg.epsilon_schedule else None,
            "out_dir": str(cfg.out_dir),
            "seed": cfg.seed,
        },
        version=__version__,
        wall_time_s=wall,
        files=[
            {
                "name": Path(p).name,
                "sha256": exports.sha256_file(p),
                "bytes": Path(p).stat().st_size,
            }
            for p in files
        ],
        checks=checks,
    )
    payload = dataclasses.asdict(manifest)
    payload["all_passed"] = manifest.all_passed
    exports.write_json(out / "manifest.json", payload)
    return manifest


def _build_parser():
    parser = argparse.ArgumentParser(prog="aclab", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="key = value config file")
    common.add_argument("--out", type=str, default=None, help="output directory")
    common.add_argument("--n", type=int, default=None, help="sphere dimension (>= 3)")
    common.add_argument("--r", type=float, default=None, help="cylinder half-length R - a")
    common.add_argument("--grid", type=int, default=None, help="node count (odd)")
    common.add_argument("--eps", type=float, default=None, help="interface width parameter")
    common.add_argument("--eps-schedule", type=str, default=None, help="comma list, decreasing")
    common.add_argument("--seed", type=int, default=None, help="rng seed echoed in the manifest")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(experiment=args.experiment)
        if args.config is not None:
            cfg = load_config(args.config, base=cfg)
            cfg = dataclasses.replace(cfg, experiment=args.experiment)
        overrides = {}
        if args.out is not None:
            overrides["out_dir"] = args.out
        if args.n is not None:
            overrides["n"] = args.n
        if args.r is not None:
            overrides["r"] = args.r
        if args.grid is not None:
            overrides["grid_N"] = args.grid
        if args.eps is not None:
            overrides["epsilon"] = args.eps
        if args.eps_schedule is not None:
            overrides["epsilon_schedule"] = parse_schedule(args.eps_schedule)
        if args.seed is not None:
            overrides["seed"] = args.seed
        cfg = dataclasses.replace(cfg, **overrides).validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        manifest = run(args.experiment, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except AclabError as exc:
        print(f"experiment failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    for c in manifest.checks:
        state = "PASS" if c.passed else "FAIL"
        print(f"[{state}] {c.name}: measured={c.measured} required {c.required}")
    if not manifest.all_passed:
        failing = [c.name for c in manifest.checks if not c.passed]
        print(f"experiment failed checks: {', '.join(failing)}", file=sys.stderr)
        return 1
    print(f"ok: {len(manifest.files)} files in {cfg.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
