"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 config error,
3 convergence failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config, parse_angle
from .core import build_hamiltonian, build_parity
from .dynamics import ConvergenceError, TimeSeries, run_simulation
from .parity import parity_project, zb_metrics
from .spectral import TruncationWarning, default_p_grid, diagonalize, energy
from .verify import run_checks

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3

OUT_ENV = "ZITTERLAB_OUT"
MANIFEST_VERSION = 1

MANIFEST_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "zitterlab run manifest",
    "type": "object",
    "required": [
        "manifest_version",
        "engine_version",
        "command",
        "config",
        "n_cut",
        "convergence_deviation",
        "wall_clock_seconds",
        "outputs",
    ],
    "properties": {
        "manifest_version": {"const": MANIFEST_VERSION},
        "engine_version": {"type": "string"},
        "command": {"enum": ["simulate", "sweep-beta", "spectrum"]},
        "config": {"type": "object"},
        "n_cut": {"type": "integer", "minimum": 1},
        "convergence_deviation": {"type": ["number", "null"]},
        "wall_clock_seconds": {"type": "number", "minimum": 0},
        "outputs": {"type": "array", "items": {"type": "string"}, "minItems": 1},
    },
    "additionalProperties": False,
}


def format_float(value) -> str:
    """Shortest round-trip decimal."""
    return repr(float(value))


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else format_float(v) for v in row])


def write_timeseries(path: Path, series: TimeSeries) -> None:
    write_csv(path, TimeSeries.COLUMNS, zip(*series.columns()))


def write_manifest(path: Path, command: str, cfg: RunConfig, n_cut: int, deviation, started: float, outputs) -> None:
    manifest = {
        "manifest_version": MANIFEST_VERSION,
        "engine_version": __version__,
        "command": command,
        "config": {k: cfg.values[k] for k in sorted(cfg.values)},
        "n_cut": int(n_cut),
        "convergence_deviation": deviation,
        "wall_clock_seconds": round(time.perf_counter() - started, 6),
        "outputs": [str(p) for p in outputs],
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _out_dir(args) -> Path:
    out = args.out_dir or os.environ.get(OUT_ENV) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _simulate(cfg: RunConfig) -> TimeSeries:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        return run_simulation(cfg.simulation)


def _summary(cfg: RunConfig, series: TimeSeries) -> dict:
    sim = cfg.simulation
    decomp = parity_project(sim.initial(), build_parity(sim.n_cut))
    if series.times.size >= 64:
        m = zb_metrics(series)
        ptp, freq = m.peak_to_peak, m.dominant_frequency
    else:
        ptp, freq = float(np.ptp(series.x_mean)), float("nan")
    return {
        "beta": sim.beta,
        "lambda_c": sim.params.lambda_c,
        "peak_to_peak": ptp,
        "dominant_frequency": freq,
        "even_weight": decomp.even_weight,
        "odd_weight": decomp.odd_weight,
    }


def _print_summary(s: dict, out=None) -> None:
    print(
        f"beta={s['beta']:.6g} lambda_c={s['lambda_c']:.6g} peak_to_peak={s['peak_to_peak']:.6e} "
        f"dominant_frequency={s['dominant_frequency']:.6g} "
        f"even_weight={s['even_weight']:.6g} odd_weight={s['odd_weight']:.6g}",
        file=out or sys.stdout,
    )


def _report_convergence(exc: ConvergenceError) -> int:
    print(f"convergence failure: {exc}", file=sys.stderr)
    worst = int(np.argmax(exc.deviation))
    print(f"  worst deviation at t={exc.times[worst]:.6g}", file=sys.stderr)
    return EXIT_CONVERGENCE


def cmd_simulate(args) -> int:
    started = time.perf_counter()
    cfg = load_config(args.config)
    try:
        series = _simulate(cfg)
    except ConvergenceError as exc:
        return _report_convergence(exc)
    out = _out_dir(args)
    stem = Path(args.config).stem
    csv_path = out / f"{stem}_timeseries.csv"
    write_timeseries(csv_path, series)
    write_manifest(out / f"{stem}_manifest.json", "simulate", cfg, cfg.simulation.n_cut,
                   series.metadata["convergence_deviation"], started, [csv_path])
    _print_summary(_summary(cfg, series))
    return EXIT_OK


def parse_beta_list(text: str) -> list[float]:
    try:
        betas = [parse_angle(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if not betas:
        raise argparse.ArgumentTypeError("empty beta list")
    return betas


def cmd_sweep_beta(args) -> int:
    started = time.perf_counter()
    base = load_config(args.config)
    stem = Path(args.config).stem
    out = _out_dir(args)
    rows, outputs, deviations = [], [], []
    for i, beta in enumerate(sorted(args.betas)):
        cfg = base.with_beta(beta)
        try:
            series = _simulate(cfg)
        except ConvergenceError as exc:
            return _report_convergence(exc)
        path = out / f"{stem}_beta{i:02d}_timeseries.csv"
        write_timeseries(path, series)
        outputs.append(path)
        deviations.append(series.metadata["convergence_deviation"])
        summary = _summary(cfg, series)
        _print_summary(summary)
        rows.append((beta, summary["peak_to_peak"], summary["dominant_frequency"], summary["even_weight"]))
    metrics_path = out / f"{stem}_sweep_metrics.csv"
    write_csv(metrics_path, ("beta", "peak_to_peak", "dominant_frequency", "even_weight"), rows)
    outputs.append(metrics_path)
    worst = None if any(d is None for d in deviations) else max(deviations)
    write_manifest(out / f"{stem}_sweep_manifest.json", "sweep-beta", base, base.simulation.n_cut,
                   worst, started, outputs)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    started = time.perf_counter()
    cfg = load_config(args.config)
    sim = cfg.simulation
    spec = diagonalize(build_hamiltonian(sim.params, sim.n_cut), build_parity(sim.n_cut))
    out = _out_dir(args)
    stem = Path(args.config).stem
    spec_path = out / f"{stem}_spectrum.csv"
    rows = ((str(k), lam, str(int(lab))) for k, (lam, lab) in enumerate(zip(spec.eigenvalues, spec.parity_labels)))
    write_csv(spec_path, ("index", "eigenvalue", "parity_label"), rows)
    disp_path = out / f"{stem}_dispersion.csv"
    p = default_p_grid()
    e = energy(p, sim.params)
    write_csv(disp_path, ("p", "E_plus", "E_minus"), zip(p, e, -e))
    write_manifest(out / f"{stem}_spectrum_manifest.json", "spectrum", cfg, sim.n_cut, None, started,
                   [spec_path, disp_path])
    print(f"n_cut={sim.n_cut} eigenvalues={spec.dim} range=[{spec.eigenvalues[0]:.6g}, {spec.eigenvalues[-1]:.6g}]")
    return EXIT_OK


def cmd_verify(args) -> int:
    level = "full" if args.full else "quick"
    results = run_checks(level)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY
    print(f"all {len(results)} checks passed ({level})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", help=f"output directory (fallback: ${OUT_ENV}, then cwd)")
    common.add_argument("--seedless", action="store_true",
                        help="reserved; the engine uses no random numbers")

    parser = argparse.ArgumentParser(prog="zitterlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="simulate one trajectory")
    p.add_argument("config")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep-beta", parents=[common], help="simulate a list of spin-mixing angles")
    p.add_argument("config")
    p.add_argument("--betas", required=True, type=parse_beta_list,
                   help="comma-separated angles, e.g. 0,pi/12,pi/6,pi/4")
    p.set_defaults(func=cmd_sweep_beta)

    p = sub.add_parser("spectrum", parents=[common], help="dump the truncated spectrum")
    p.add_argument("config")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", parents=[common], help="run the invariant checks")
    p.add_argument("--full", action="store_true", help="include the oracle agreement checks")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
