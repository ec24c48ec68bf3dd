"""Command-line front end: simulate | wave | speed | converge | compare."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .analysis import (comparison_harness, estimate_speed,
                       gamma_convergence_study, support_confinement_check,
                       track_fronts)
from .config import ConfigError, RunConfig, build_initial_field, load_config
from .dynamics import GridField, run, saturation_time_map
from .errors import ScientificError
from .kernels import front_profile
from .output import write_csv, write_field_csv, write_json
from .waves import export_wave, find_c_star, sample_wave, shoot_profile

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_SCIENCE = 4


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="satspread",
        description="Nonlocal growth-with-congestion simulator and analysis tool")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (("simulate", "time-integrate one model run"),
                      ("wave", "compute wave profiles and the minimal speed"),
                      ("speed", "measure the spreading speed of a compact seed"),
                      ("converge", "stiff-pressure convergence study"),
                      ("compare", "ordered-pair comparison run")):
        cmd = sub.add_parser(name, help=doc)
        cmd.add_argument("--config", required=True, help="path to the run config")
        cmd.add_argument("--out", default=None, help="output directory override")
        cmd.add_argument("--threads", type=int, default=1,
                         help="worker threads for independent runs")
        cmd.add_argument("--seed", type=int, default=None,
                         help="reserved for randomized property suites")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO

    for note in cfg.warnings:
        print(f"warning: {note}", file=sys.stderr)

    out_dir = Path(args.out) if args.out else Path(cfg.output_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO

    handler = {"simulate": _cmd_simulate, "wave": _cmd_wave,
               "speed": _cmd_speed, "converge": _cmd_converge,
               "compare": _cmd_compare}[args.command]
    try:
        return handler(cfg, out_dir, threads=args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ScientificError as exc:
        print(f"scientific failure: {exc}", file=sys.stderr)
        return EXIT_SCIENCE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def _resolved(cfg: RunConfig) -> dict:
    return cfg.raw


def _initial_field(cfg: RunConfig, spec=None) -> GridField:
    spec = cfg.initial_spec if spec is None else spec
    sampler = None
    if spec["kind"] == "wave_envelope":
        if not cfg.growth.monotone_cap:
            raise ConfigError("[growth] wave_envelope initial data requires monotone_cap")
        profile = front_profile(cfg.kernel)
        result = find_c_star(cfg.growth, profile)
        wave = shoot_profile(spec["speed_factor"] * result.c_star, cfg.growth,
                             profile)
        direction = np.zeros(cfg.kernel.dim)
        direction[0] = 1.0
        sampler = export_wave(wave, direction, spec["offset"],
                              minimal=spec["speed_factor"] <= 1.0)
    return build_initial_field(cfg, spec=spec, wave_sampler=sampler)


def _run_once(cfg: RunConfig):
    u0 = _initial_field(cfg)
    return run(u0, cfg.model, cfg.stencil, cfg.growth,
               snapshot_interval=cfg.snapshot_interval, record_lipschitz=True)


def _cmd_simulate(cfg: RunConfig, out_dir: Path, threads: int = 1) -> int:
    result = _run_once(cfg)
    grid = result.final
    for idx, (t, snap) in enumerate(zip(result.times, result.snapshots)):
        field = GridField(snap, grid.spacing, grid.origin, t)
        write_field_csv(out_dir / f"snapshot_{idx:04d}.csv", field,
                        config=_resolved(cfg))
    sat = saturation_time_map(result)
    if grid.dim == 1:
        write_csv(out_dir / "saturation_time.csv", ["x", "t_saturated"],
                  [grid.axis_coords(0), sat], config=_resolved(cfg))
    else:
        write_csv(out_dir / "saturation_time.csv", ["t_saturated"],
                  [sat.ravel(order="C")], config=_resolved(cfg))
    write_json(out_dir / "summary.json",
               {"final_time": result.final.time,
                "clamped_total": result.clamped_total,
                "monitors": result.monitors,
                "snapshot_times": list(result.times),
                "warnings": cfg.warnings},
               config=_resolved(cfg))
    hard_violation = (result.monitors["time_monotonicity_gap"] > 0.0
                      or result.monitors["mask_monotonicity_violations"] > 0.0)
    if hard_violation:
        print("scientific failure: monotonicity violated during the run",
              file=sys.stderr)
        return EXIT_SCIENCE
    return EXIT_OK


def _cmd_wave(cfg: RunConfig, out_dir: Path, threads: int = 1) -> int:
    if not cfg.growth.monotone_cap:
        raise ConfigError("[growth] the wave command requires monotone_cap growth")
    profile = front_profile(cfg.kernel,
                            sample_spacing=cfg.study.get("sample_spacing"))
    result = find_c_star(cfg.growth, profile,
                         tol=cfg.study.get("wave_tol", 1e-8),
                         ode_step=cfg.study.get("ode_step"))
    write_json(out_dir / "minimal_speed.json",
               {"c_star": result.c_star, "bracket": list(result.bracket),
                "tol": result.tol, "analytic_bounds": list(result.analytic_bounds),
                "phi_ell_lo": result.phi_ell_lo, "phi_ell_hi": result.phi_ell_hi,
                "interior_min": result.interior_min, "ode_step": result.ode_step},
               config=_resolved(cfg))
    write_csv(out_dir / "front_profile.csv", ["s", "h"],
              [profile.s, profile.samples], config=_resolved(cfg))
    s_max = cfg.study.get("s_max", 2.0 * cfg.kernel.radius)
    for tag, factor in (("cstar", 1.0), ("1p5cstar", 1.5), ("2cstar", 2.0)):
        wave = shoot_profile(factor * result.c_star, cfg.growth, profile,
                             s_max=s_max, ode_step=cfg.study.get("ode_step"))
        phi = wave.phi
        if factor == 1.0:
            # The bisected speed leaves a +-tol tail past ell; export the
            # semi-compact minimal wave those values approximate.
            phi = sample_wave(wave, wave.s, minimal=True)
        write_csv(out_dir / f"profile_{tag}.csv", ["s", "phi"],
                  [wave.s, phi], config=_resolved(cfg))
    # scan of the bisection signal across the analytic speed bracket
    lo, hi = result.analytic_bounds
    c_scan = np.linspace(lo, hi, 21)
    phi_ell = np.array([shoot_profile(c, cfg.growth, profile,
                                      s_max=cfg.kernel.radius,
                                      ode_step=cfg.study.get("ode_step"))
                        .phi_at_ell for c in c_scan])
    write_csv(out_dir / "speed_scan.csv", ["c", "phi_at_ell"],
              [c_scan, phi_ell], config=_resolved(cfg))
    return EXIT_OK


def _cmd_speed(cfg: RunConfig, out_dir: Path, threads: int = 1) -> int:
    if not cfg.growth.monotone_cap:
        raise ConfigError("[growth] the speed study requires monotone_cap growth")
    profile = front_profile(cfg.kernel)
    reference = find_c_star(cfg.growth, profile).c_star
    result = _run_once(cfg)
    track = track_fronts(result)
    estimate = estimate_speed(track,
                              window_fraction=cfg.study.get("window_fraction", 0.5),
                              reference_c_star=reference)
    confinement = support_confinement_check(result, cfg.stencil)
    tolerance = cfg.study.get("tolerance", 0.05)
    ratio = estimate.fitted_speed / reference
    passed = (not estimate.degenerate and abs(ratio - 1.0) <= tolerance
              and confinement.total_violations == 0)
    write_csv(out_dir / "front_track.csv",
              ["t", "radius_saturated", "radius_support"],
              [track.times, track.radius_saturated, track.radius_support],
              config=_resolved(cfg))
    write_json(out_dir / "speed_report.json",
               {"fitted_speed": estimate.fitted_speed,
                "reference_c_star": reference, "speed_ratio": ratio,
                "tolerance": tolerance, "residual": estimate.residual,
                "fit_window": list(estimate.fit_window),
                "degenerate": estimate.degenerate,
                "confinement_violations": confinement.total_violations,
                "passed": passed},
               config=_resolved(cfg))
    return EXIT_OK if passed else EXIT_SCIENCE


def _cmd_converge(cfg: RunConfig, out_dir: Path, threads: int = 1) -> int:
    u0 = _initial_field(cfg)
    gammas = cfg.study.get("gamma_list", [8.0, 32.0, 128.0, 512.0])
    study = gamma_convergence_study(u0, gammas, cfg.stencil, cfg.growth,
                                    horizon=cfg.model.t_end,
                                    threshold=cfg.study.get("threshold", 0.05),
                                    max_workers=max(1, threads))
    write_csv(out_dir / "gamma_distances.csv", ["gamma", "dt", "sup_distance"],
              [np.asarray(study.gammas), np.asarray(study.dts),
               np.asarray(study.distances)], config=_resolved(cfg))
    write_json(out_dir / "converge_report.json",
               {"gammas": list(study.gammas), "distances": list(study.distances),
                "reference_dt": study.reference_dt, "horizon": study.horizon,
                "threshold": study.threshold,
                "strictly_decreasing": study.strictly_decreasing,
                "passed": study.passed},
               config=_resolved(cfg))
    return EXIT_OK if study.passed else EXIT_SCIENCE


def _cmd_compare(cfg: RunConfig, out_dir: Path, threads: int = 1) -> int:
    low = _initial_field(cfg)
    high = _initial_field(cfg, spec=cfg.initial_high_spec)
    try:
        report = comparison_harness(low, high, cfg.model, cfg.stencil, cfg.growth)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    write_json(out_dir / "compare_report.json",
               {"max_violation": report.max_violation, "passed": report.passed,
                "n_steps": report.n_steps, "tolerance": report.tolerance},
               config=_resolved(cfg))
    return EXIT_OK if report.passed else EXIT_SCIENCE


if __name__ == "__main__":
    sys.exit(main())
