"""Command-line entry points.

Exit codes: 0 success, 1 input or parse error, 2 analysis degeneracy.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .boundary import GENERATOR_NAME, BoundarySeries
from .exceptions import DegenerateSeriesError, InputError, UnfittableSectorError
from .fixtures import DEFAULT_STATION
from .geo_ingest import parse_drive_test, parse_station_config, smooth_power, to_polar
from .hurst import METHODS, HurstEstimate, estimate_all
from .pathloss import build_measured_boundary, global_fit, partition_sectors, build_derived_boundary
from .report import RunReport, comment_header, estimates_csv, format_table, loglog_csv, sha256_file
from .stats import empirical_pdf, power_field, tail_report
from .synth import FractalBoundaryConfig, fractal_boundary

log = logging.getLogger("fractal_coverage")

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE = 0, 1, 2
SEED_ENV = "FRACTAL_COVERAGE_SEED"


def resolve_seed(flag):
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise InputError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return 0


def _read(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"file not found: {path}")
    return p.read_text(encoding="utf-8")


def _write_outputs(out: Path, files: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, text in sorted(files.items()):
        (out / name).write_text(text, encoding="utf-8", newline="\n")


def _estimate_files(results: dict, header: str) -> dict:
    files = {"estimates.csv": estimates_csv(results, header)}
    for method, res in results.items():
        if isinstance(res, HurstEstimate):
            files[f"loglog_{method}.csv"] = loglog_csv(res, header)
    return files


def _stats_block(distances, header: str) -> tuple[dict, dict]:
    stats, files = {}, {}
    try:
        hist = empirical_pdf(distances)
        files["histogram.csv"] = header + hist.to_csv()
        stats["histogram_bins"] = int(hist.densities.size)
    except DegenerateSeriesError as exc:
        stats["histogram"] = f"unavailable: {exc}"
    try:
        tr = tail_report(distances)
        stats.update(tr._asdict())
    except (DegenerateSeriesError, InputError) as exc:
        stats["tail_report"] = f"unavailable: {exc}"
    return stats, files


def _available(results):
    return [m for m in METHODS if isinstance(results[m], HurstEstimate)]


def cmd_analyze(args) -> int:
    seed = resolve_seed(args.seed)
    samples = parse_drive_test(_read(args.drive_test).encode("utf-8"))
    station = parse_station_config(_read(args.station))
    config = {
        "command": "analyze",
        "drive_test": args.drive_test,
        "station": args.station,
        "sectors": args.sectors,
        "pmin_dbm": args.pmin,
        "low_fraction": args.low_fraction,
        "reference": args.reference,
        "window_wavelengths": args.window_wavelengths,
        "seed": seed,
    }
    polar = smooth_power(to_polar(samples, station), station, args.window_wavelengths)
    partition = partition_sectors(polar, args.sectors)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        boundary = build_measured_boundary(partition, args.pmin, args.reference)
    for w in caught:
        log.warning("%s", w.message)
    avg = global_fit(polar, args.reference)

    results = estimate_all(boundary.distances, args.low_fraction, allow_short=args.allow_short)
    header = comment_header(config)
    stats, files = _stats_block(boundary.distances, header)
    files["boundary.csv"] = header + boundary.to_csv()
    files.update(_estimate_files(results, header))
    if args.power_field_res:
        reach = float(boundary.distances.max()) * 1.1
        field = power_field(boundary.fits, (-reach, reach, -reach, reach), args.power_field_res)
        files["power_field.csv"] = header + field.to_csv()

    summary = boundary.summary()
    summary.update({
        "extrapolated_sectors": len(boundary.metadata["extrapolated_sectors"]),
        "inside_reference_sectors": len(boundary.metadata["inside_reference_sectors"]),
        "warnings": len(caught),
        "average_gamma": avg.gamma,
        "average_psi_db": avg.psi,
    })
    degenerate = not _available(results)
    if degenerate:
        summary["condition"] = "degenerate boundary: no Hurst estimate is defined"
    report = RunReport(
        command="analyze",
        estimates=results,
        boundary=summary,
        stats=stats,
        provenance={
            "config": config,
            "input_sha256": {
                "drive_test": sha256_file(args.drive_test),
                "station": sha256_file(args.station),
            },
            "seed": seed,
            "generators": {"rng": GENERATOR_NAME},
        },
    )
    files["report.json"] = report.to_json()
    _write_outputs(Path(args.out), files)
    print(format_table(RunReport.load(files["report.json"])), end="")
    if degenerate:
        print("error: degenerate boundary; no Hurst estimate is defined", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_synth(args) -> int:
    seed = resolve_seed(args.seed)
    config = {"command": "synth", "kind": args.kind, "n": args.n, "seed": seed,
              "low_fraction": args.low_fraction}
    if args.kind == "derived":
        station = parse_station_config(_read(args.station)) if args.station else DEFAULT_STATION
        p_ref = args.pref if args.pref is not None else station.reference_power(args.d0)
        config.update({"sigma_db": args.sigma, "gamma": args.gamma, "d0_m": args.d0,
                       "pref_dbm": p_ref, "pmin_dbm": args.pmin})
        boundary = build_derived_boundary(args.gamma, p_ref, args.d0, args.pmin,
                                          shadow_sigma=args.sigma, n_sectors=args.n, seed=seed)
    else:
        config.update({"h": args.h, "base_radius_m": args.base_radius, "amplitude_m": args.amplitude})
        boundary = fractal_boundary(FractalBoundaryConfig(
            h_target=args.h, n_sectors=args.n, base_radius=args.base_radius,
            amplitude=args.amplitude, seed=seed,
        ))
    results = estimate_all(boundary.distances, args.low_fraction, allow_short=args.allow_short)
    header = comment_header(config)
    stats, files = _stats_block(boundary.distances, header)
    files["boundary.csv"] = header + boundary.to_csv()
    files.update(_estimate_files(results, header))
    summary = boundary.summary()
    if "clip_count" in boundary.metadata:
        summary["clip_count"] = boundary.metadata["clip_count"]
    generators = {"rng": GENERATOR_NAME}
    if "fgn_method" in boundary.metadata:
        generators["fgn"] = boundary.metadata["fgn_method"]
    report = RunReport(command=f"synth {args.kind}", estimates=results, boundary=summary,
                       stats=stats, provenance={"config": config, "seed": seed, "generators": generators})
    files["report.json"] = report.to_json()
    _write_outputs(Path(args.out), files)
    print(format_table(RunReport.load(files["report.json"])), end="")
    return EXIT_OK if _available(results) else EXIT_DEGENERATE


def read_series(text: str) -> np.ndarray:
    """Values from a one-column file, or the ``phi_m``/``value`` column of a CSV."""
    rows = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise InputError("series file has no values")
    col = -1
    first = rows[0].split(",")
    try:
        [float(c) for c in first]
    except ValueError:
        names = [c.strip() for c in first]
        for wanted in ("phi_m", "value"):
            if wanted in names:
                col = names.index(wanted)
                break
        rows = rows[1:]
    values = []
    for i, row in enumerate(rows, start=1):
        try:
            values.append(float(row.split(",")[col]))
        except (ValueError, IndexError):
            raise InputError(f"series row {i}: not a number: {row!r}") from None
    return np.asarray(values)


def cmd_hurst(args) -> int:
    series = read_series(_read(args.series))
    config = {"command": "hurst", "series": args.series, "low_fraction": args.low_fraction,
              "allow_short": args.allow_short, "seed": resolve_seed(args.seed)}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        results = estimate_all(series, args.low_fraction, allow_short=args.allow_short)
    for message in dict.fromkeys(str(w.message) for w in caught):
        log.warning("%s", message)
    header = comment_header(config)
    files = _estimate_files(results, header)
    report = RunReport(
        command="hurst",
        estimates=results,
        boundary={"n": int(series.size)},
        provenance={"config": config, "input_sha256": {"series": sha256_file(args.series)},
                    "seed": config["seed"]},
    )
    files["report.json"] = report.to_json()
    _write_outputs(Path(args.out), files)
    print(format_table(RunReport.load(files["report.json"])), end="")
    return EXIT_OK if _available(results) else EXIT_DEGENERATE


def cmd_report(args) -> int:
    print(format_table(RunReport.load(_read(args.report))), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help=f"random seed (falls back to ${SEED_ENV}, then 0)")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--low-fraction", type=float, default=0.1,
                        help="share of lowest Fourier frequencies for the periodogram fit")
    common.add_argument("--allow-short", action="store_true",
                        help="estimate on series of 16..63 values (with a warning)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="fractal-coverage", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="drive test -> boundary -> Hurst report")
    p.add_argument("drive_test")
    p.add_argument("station")
    p.add_argument("--sectors", type=int, default=120)
    p.add_argument("--pmin", type=float, default=-110.0)
    p.add_argument("--reference", choices=("nearest", "farthest"), default="nearest")
    p.add_argument("--window-wavelengths", type=float, default=40.0)
    p.add_argument("--power-field-res", type=float, default=None,
                   help="also emit the fitted power field at this grid spacing (m)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", parents=[common], help="generate a derived or fractal boundary")
    p.add_argument("kind", choices=("derived", "fractal"))
    p.add_argument("--n", "--sectors", dest="n", type=int, default=120)
    p.add_argument("--sigma", type=float, default=4.0, help="shadowing std (dB), derived")
    p.add_argument("--gamma", type=float, default=3.5, help="path-loss exponent, derived")
    p.add_argument("--d0", type=float, default=100.0, help="reference distance (m), derived")
    p.add_argument("--pref", type=float, default=None,
                   help="power at d0 (dBm); default is free space from the station config")
    p.add_argument("--station", default=None, help="station config file, derived")
    p.add_argument("--pmin", type=float, default=-110.0)
    p.add_argument("--h", type=float, default=0.9, help="target Hurst parameter, fractal")
    p.add_argument("--base-radius", type=float, default=1000.0)
    p.add_argument("--amplitude", type=float, default=100.0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("hurst", parents=[common], help="three Hurst estimates of a series file")
    p.add_argument("series")
    p.set_defaults(func=cmd_hurst)

    p = sub.add_parser("report", help="print a report.json as a table")
    p.add_argument("report")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UnfittableSectorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateSeriesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
