"""Command-line interface.

Subcommands: triptych, contrast-sweep, dephasing-sweep, point, selftest.
Exit status: 0 success, 1 any failed grid point under --strict (or any
failed self-test check), 2 configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import parse_config
from .errors import SnRingError
from .output import write_manifest, write_records
from .svgplot import PlotSpec, SeriesSpec, render_line_plot
from .sweeps import (
    SweepConfig,
    run_dephasing_vs_mx,
    run_sweep,
)
from .verify import run_selftest

EXPERIMENT_OF_COMMAND = {
    "triptych": "energy_triptych",
    "contrast-sweep": "contrast_vs_tar",
    "dephasing-sweep": "dephasing_vs_mx",
    "point": "single_point",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snring",
        description="Flux-threaded ring interferometer with a superconducting "
                    "contact: transport, contrast, LDOS, and dephasing sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*EXPERIMENT_OF_COMMAND, "selftest"):
        cmd = sub.add_parser(name)
        if name == "selftest":
            continue
        cmd.add_argument("--config", type=Path, default=None,
                         help="configuration file (key = value lines)")
        cmd.add_argument("--out", type=str, default=None, help="output directory")
        cmd.add_argument("--format", choices=("csv", "json"), default=None)
        cmd.add_argument("--plot", action="store_true", help="also render SVG charts")
        cmd.add_argument("--workers", type=int, default=None)
        cmd.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                         help="override a single configuration key (repeatable)")
        cmd.add_argument("--strict", action="store_true",
                         help="exit 1 if any grid point carries an error flag")
    return parser


def _resolve_config(args) -> SweepConfig:
    text = args.config.read_text(encoding="utf-8") if args.config else ""
    overrides = list(args.set)
    overrides.append(f"experiment={EXPERIMENT_OF_COMMAND[args.command]}")
    if args.out is not None:
        overrides.append(f"out_dir={args.out}")
    if args.format is not None:
        overrides.append(f"format={args.format}")
    if args.workers is not None:
        overrides.append(f"workers={args.workers}")
    if args.plot:
        overrides.append("plot=true")
    return parse_config(text, overrides)


def _triptych_plots(records, config, out_dir: Path) -> list[dict]:
    flux_a = config.flux_a
    entries = []
    charts = [
        ("transmission.svg", PlotSpec(
            title=f"Transmission vs energy (flux {flux_a:.3f})",
            x_label="energy", y_label="transmission",
            series=(
                SeriesSpec("energy", "T_bare_a", "no contact", role="bare"),
                SeriesSpec("energy", "T_full_a", f"t_ar = {config.t_ar}", role="coupled"),
            ))),
        ("contrast.svg", PlotSpec(
            title="Interference contrast vs energy",
            x_label="energy", y_label="contrast",
            series=(
                SeriesSpec("energy", "C_bare", "no contact", role="bare"),
                SeriesSpec("energy", "C_full", f"t_ar = {config.t_ar}", role="coupled"),
            ))),
    ]
    geometry = config.geometry()
    if records and records[0].ldos is not None:
        probe_sites = (
            (geometry.sc_sites[len(geometry.sc_sites) // 2], "contact site"),
            ((geometry.lead_i_sites[-1] + 1 + geometry.n_ring - 1) // 2,
             "clean-arm site"),
            (geometry.lead_ii_sites[0], "drain site"),
        )
        charts.append(("ldos.svg", PlotSpec(
            title="Local density of states vs energy",
            x_label="energy", y_label="LDOS", log_y=True,
            series=tuple(
                SeriesSpec("energy", f"site_{site}", f"{label} {site}")
                for site, label in probe_sites
            ))))
    for filename, spec in charts:
        dropped = render_line_plot(records, spec, out_dir / filename)
        entries.append({"path": str(out_dir / filename), "dropped_points": dropped})
    return entries


def _contrast_plots(records, config, out_dir: Path) -> list[dict]:
    spec = PlotSpec(
        title=f"Contrast vs contact coupling (E = {config.energy})",
        x_label="t_ar", y_label="contrast",
        series=(
            SeriesSpec("t_ar", "C_bare", "no contact", role="bare"),
            SeriesSpec("t_ar", "C_full", "with contact", role="coupled"),
        ))
    dropped = render_line_plot(records, spec, out_dir / "contrast_vs_tar.svg")
    return [{"path": str(out_dir / "contrast_vs_tar.svg"), "dropped_points": dropped}]


def _dephasing_plots(records, summary, config, out_dir: Path) -> list[dict]:
    guides = []
    if summary.averaged:
        guides.append(("My-averaged", tuple((float(mx), rate)
                                            for mx, rate in summary.averaged)))
        mx0, rate0 = summary.averaged[0]
        guides.append(("1/Mx guide", tuple(
            (float(mx), rate0 * mx0 / mx) for mx, _ in summary.averaged)))
    spec = PlotSpec(
        title=f"Dephasing rate vs spacer depth (t_ar = {config.t_ar})",
        x_label="Mx", y_label="dephasing rate",
        log_x=True, log_y=True,
        series=tuple(
            SeriesSpec("mx", "rate", f"My = {my}", where=("my", my))
            for my in config.my_values
        ),
        guides=tuple(guides),
    )
    dropped = render_line_plot(records, spec, out_dir / "dephasing_vs_mx.svg")
    return [{"path": str(out_dir / "dephasing_vs_mx.svg"), "dropped_points": dropped}]


def _run_selftest() -> int:
    reports = run_selftest()
    width = max(len(r.name) for r in reports)
    print(f"{'status':6s}  {'check':{width}s}  {'measured':>12s}  {'tolerance':>10s}  detail")
    for r in reports:
        print(f"{r.status:6s}  {r.name:{width}s}  {r.measured:12.3e}  "
              f"{r.tolerance:10.0e}  {r.detail}")
    failed = sum(not r.passed for r in reports)
    print(f"{len(reports) - failed}/{len(reports)} checks passed")
    return 0 if failed == 0 else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return _run_selftest()
    try:
        config = _resolve_config(args)
    except SnRingError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    out_dir = Path(config.out_dir)
    summary = None
    if config.experiment == "dephasing_vs_mx":
        records, summary = run_dephasing_vs_mx(config)
    else:
        records = run_sweep(config)
    suffix = "json" if config.out_format == "json" else "csv"
    data_path = out_dir / f"{config.experiment}.{suffix}"
    outputs = [write_records(records, config.out_format, data_path,
                             with_ldos=config.ldos)]
    extra = {}
    if summary is not None:
        extra["dephasing"] = {
            "averaged": [[mx, rate] for mx, rate in summary.averaged],
            "log_log_slope": summary.slope,
            "excluded_points": summary.excluded,
        }
        print(f"dephasing log-log slope (Mx in [2, 20]): {summary.slope}",
              file=sys.stderr)
    if config.plot:
        if config.experiment == "energy_triptych":
            outputs += _triptych_plots(records, config, out_dir)
        elif config.experiment == "contrast_vs_tar":
            outputs += _contrast_plots(records, config, out_dir)
        elif config.experiment == "dephasing_vs_mx":
            outputs += _dephasing_plots(records, summary, config, out_dir)
    grid_shape = {"points": len(records)}
    write_manifest(config, outputs, out_dir / "manifest.json", grid_shape, extra)
    errors = sum(1 for r in records if r.error is not None)
    if errors:
        print(f"{errors} of {len(records)} grid points carry an error flag",
              file=sys.stderr)
    if config.experiment == "single_point" and records and records[0].error is None:
        r = records[0]
        print(f"E={r.energy:g} T_bare={r.t_bare_a:.12g} T_full={r.t_full_a:.12g} "
              f"C_bare={r.c_bare:.12g} C_full={r.c_full:.12g} rate={r.rate:.12g}")
    if args.strict and errors:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
