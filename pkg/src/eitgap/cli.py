"""Command-line front end.

Subcommands: ``band`` (Bloch-wavevector table, analytic and numeric side by
side), ``reflect`` (reflection spectrum of the finite sample), ``evolve``
(raw polariton evolution), ``protocol`` (staged trapping scenario), and
``check`` (validity report only; ``--strict`` makes any failed check fatal).

Exit codes: 0 success, 1 config/parse error, 2 numerical failure,
3 validity failure under ``check --strict``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bandstructure, dynamics, protocol, reflection, report
from .config import Config, load_config
from .errors import ConfigError, NumericalError, ValidationError

__all__ = ["dispatch", "main"]


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eitgap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("band", "band-structure table over a frequency grid"),
        ("reflect", "reflection/transmission spectrum of the sample"),
        ("evolve", "raw polariton evolution run"),
        ("protocol", "staged storage/trapping scenario"),
        ("check", "validity report for a scenario"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="path to the JSON config file")
        if name == "check":
            p.add_argument("--strict", action="store_true", help="exit 3 if any check fails")
    return parser


def _medium_metadata(cfg: Config) -> dict:
    return {f"medium.{k}": v for k, v in cfg.medium.dump().items()}


def _drive_metadata(cfg: Config) -> dict:
    out = {}
    for k, v in cfg.drive.dump().items():
        out[f"drive.{k}"] = v if not isinstance(v, dict) else "ramp"
    return out


def _cmd_band(cfg: Config) -> int:
    cfg.require("band")
    medium = cfg.medium.params()
    drive = cfg.drive.drive_point(medium)
    grid = cfg.scan.grid_rad()
    analytic, numeric = bandstructure.band_table(grid, drive, medium, cfg.scan.slab_count)
    out = Path(cfg.output.directory)
    columns = {
        "omega": grid,
        "k_real_offset_analytic": np.array([p.k_real for p in analytic]),
        "k_imag_analytic": np.array([p.k_imag for p in analytic]),
        "in_gap_analytic": np.array([p.in_gap for p in analytic]),
        "k_real_offset_numeric": np.array([p.k_real for p in numeric]),
        "k_imag_numeric": np.array([p.k_imag for p in numeric]),
        "in_gap_numeric": np.array([p.in_gap for p in numeric]),
    }
    meta = {
        **_medium_metadata(cfg),
        **_drive_metadata(cfg),
        "slab_count": cfg.scan.slab_count,
        "period_a_m": drive.period,
        "shift_amplitude_rad_s": drive.shift_amplitude,
    }
    report.write_csv(out / "band.csv", columns, meta)
    if cfg.output.svg:
        report.svg_line_chart(
            out / "band.svg", grid,
            {"k_imag analytic": columns["k_imag_analytic"], "k_imag numeric": columns["k_imag_numeric"]},
            "bandgap attenuation", "omega (rad/s)", "Im K (rad/m)",
        )
    gap = int(np.count_nonzero(columns["in_gap_numeric"]))
    print(f"band: wrote {len(grid)} points to {out / 'band.csv'} ({gap} inside the gap)")
    return 0


def _cmd_reflect(cfg: Config) -> int:
    cfg.require("reflect")
    medium = cfg.medium.params()
    drive = cfg.drive.drive_point(medium)
    grid = cfg.scan.grid_rad()
    points = reflection.reflection_spectrum(grid, medium, drive, cfg.scan.slab_count)
    geometry = reflection.sample_geometry(medium, drive)
    columns = reflection.spectrum_arrays(points)
    out = Path(cfg.output.directory)
    meta = {
        **_medium_metadata(cfg),
        **_drive_metadata(cfg),
        "slab_count": cfg.scan.slab_count,
        "period_a_m": geometry.period_a,
        "period_count": geometry.period_count,
        "length_used_m": geometry.length_used,
        "length_dropped_m": geometry.length_dropped,
    }
    report.write_csv(out / "reflect.csv", columns, meta)
    if cfg.output.svg:
        report.svg_line_chart(
            out / "reflect.svg", grid,
            {"reflectivity": columns["reflectivity"], "transmissivity": columns["transmissivity"],
             "absorption": columns["absorption"]},
            "sample reflection spectrum", "omega (rad/s)", "fraction",
        )
    peak = int(np.argmax(columns["reflectivity"]))
    print(f"reflect: wrote {len(points)} points to {out / 'reflect.csv'}; "
          f"peak reflectivity {columns['reflectivity'][peak]:.4f} at omega {grid[peak]:.6g} rad/s")
    return 0


def _cmd_evolve(cfg: Config) -> int:
    cfg.require("evolve")
    medium = cfg.medium.params()
    schedule = cfg.drive.schedule(medium)
    grid = cfg.grid.spec()
    state = dynamics.gaussian_state(grid, cfg.pulse.center_m, cfg.pulse.rms_width_m)
    ev = cfg.evolve
    traj = dynamics.evolve(
        state, schedule, medium, ev.t0_s, ev.t1_s, ev.dt_s,
        snapshot_stride=cfg.output.snapshot_stride, trace_stride=max(1, cfg.output.snapshot_stride // 4),
    )
    out = Path(cfg.output.directory)
    meta = {**_medium_metadata(cfg), **_drive_metadata(cfg), "t0_s": ev.t0_s, "t1_s": ev.t1_s,
            "dt_s": ev.dt_s, "wrap_warning": traj.wrap_warning}
    report.write_trajectory_csv(out / "trajectory.csv", traj.snapshots, meta)
    if cfg.output.binary:
        report.write_trajectory_binary(out / "trajectory.bin", traj.snapshots)
    if cfg.output.svg:
        field = np.array([np.cos(s.theta) ** 2 * (np.abs(s.state.psi_plus) ** 2 + np.abs(s.state.psi_minus) ** 2)
                          for s in traj.snapshots])
        report.svg_heatmap(out / "field.svg", field, "field intensity", "z", "t")
    print(f"evolve: {len(traj.snapshots)} snapshots to {out / 'trajectory.csv'}; "
          f"final norm {traj.final.norm:.6g}" + ("; WRAP WARNING" if traj.wrap_warning else ""))
    return 0


def _metrics_columns(result) -> dict:
    m = result.metrics
    return {
        "initial_norm": np.array([m.initial_norm]),
        "final_norm": np.array([m.final_norm]),
        "norm_drift": np.array([m.norm_drift]),
        "trapped_fraction": np.array([m.trapped_fraction]),
        "in_medium_final": np.array([m.in_medium_final]),
        "centroid_release_m": np.array([m.centroid_release]),
        "centroid_trap_end_m": np.array([m.centroid_trap_end]),
        "centroid_drift_m": np.array([m.centroid_drift]),
        "oscillation_period_tau_s": np.array([m.oscillation_period_tau]),
        "expected_period_tau_s": np.array([m.expected_period_tau]),
        "wrap_warning": np.array([result.wrap_warning]),
    }


def _checks_columns(validity) -> dict:
    return {
        "check": np.array([c.name for c in validity.checks]),
        "kind": np.array([c.kind for c in validity.checks]),
        "value": np.array([c.value for c in validity.checks]),
        "bound": np.array([c.bound for c in validity.checks]),
        "ratio": np.array([c.ratio for c in validity.checks]),
        "status": np.array([c.status for c in validity.checks]),
    }


def _cmd_protocol(cfg: Config) -> int:
    cfg.require("protocol")
    scenario = cfg.make_scenario()
    result = protocol.run_protocol(scenario)
    out = Path(cfg.output.directory)
    meta = {**_medium_metadata(cfg), "delta_hz": cfg.drive.delta_hz,
            "t_release_s": scenario.t_release, "t_trap_end_s": scenario.t_trap_end}
    report.write_trajectory_csv(out / "trajectory.csv", result.snapshots, meta)
    tr = result.trace
    report.write_csv(out / "trace.csv", {
        "t": tr.t, "tau": tr.tau, "theta": tr.theta, "norm": tr.norm,
        "forward_norm": tr.forward_norm, "centroid_m": tr.centroid,
    }, meta)
    report.write_csv(out / "summary.csv", _metrics_columns(result), meta)
    report.write_csv(out / "checks.csv", _checks_columns(result.validity), meta)
    m = result.metrics
    summary_lines = [f"{k} = {report._format_cell(v[0])}" for k, v in _metrics_columns(result).items()]
    report.write_atomic_text(out / "summary.txt", "\n".join(summary_lines) + "\n")
    if cfg.output.binary:
        report.write_trajectory_binary(out / "trajectory.bin", result.snapshots)
    if cfg.output.svg:
        times = np.array([s.time for s in result.snapshots])
        report.svg_line_chart(out / "schedule.svg", times,
                              {"omega_c": np.array([s.omega_c for s in result.snapshots]),
                               "omega_s": np.array([s.omega_s for s in result.snapshots])},
                              "drive schedule", "t (s)", "Rabi frequency (rad/s)")
        field = np.array([np.cos(s.theta) ** 2 * (np.abs(s.state.psi_plus) ** 2 + np.abs(s.state.psi_minus) ** 2)
                          for s in result.snapshots])
        report.svg_heatmap(out / "field.svg", field, "field intensity", "z", "t")
    print(f"protocol: trapped fraction {m.trapped_fraction:.4f}, centroid drift {m.centroid_drift:.4g} m, "
          f"norm drift {m.norm_drift:.3g}" + ("; WRAP WARNING" if result.wrap_warning else ""))
    return 0


def _cmd_check(cfg: Config, strict: bool) -> int:
    cfg.require("check")
    scenario = cfg.make_scenario()
    validity = protocol.validity_report(scenario)
    for c in validity.checks:
        print(f"{c.status.upper():4s} {c.name:22s} value={c.value:.6g} bound={c.bound:.6g} ratio={c.ratio:.6g}")
    if cfg.output is not None:
        report.write_csv(Path(cfg.output.directory) / "checks.csv", _checks_columns(validity), _medium_metadata(cfg))
    if strict and not validity.all_pass:
        print(f"check: FAILED ({', '.join(validity.failures)})", file=sys.stderr)
        return 3
    return 0


def dispatch(argv: list[str]) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 1
        return 0 if code == 0 else 1
    try:
        cfg = load_config(args.config)
        if args.command == "band":
            return _cmd_band(cfg)
        if args.command == "reflect":
            return _cmd_reflect(cfg)
        if args.command == "evolve":
            return _cmd_evolve(cfg)
        if args.command == "protocol":
            return _cmd_protocol(cfg)
        return _cmd_check(cfg, args.strict)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
