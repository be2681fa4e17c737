"""Command-line front end.

    obit simulate       Monte-Carlo BER / iteration sweeps -> CSV + manifest
    obit check-bounds   convergence-bound verification -> JSON report
    obit export-dataset training-set generation -> dataset directory

Exit codes: 0 success (and, for check-bounds, all bounds satisfied),
1 runtime failure or violated bounds, 2 usage errors.  Every run writes a
manifest that reproduces it: the fully resolved configuration, seed, tool
version, and a content hash of the resolved inputs.  File writes go through
a temp-file rename so interrupted runs never leave half-written outputs.
"""

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import os
import sys
import time

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .dataio import export_dataset
from .diem import load_params
from .harness import (
    DETECTOR_NAMES,
    DetectorSpec,
    run_bound_suite,
    run_sweep,
    small_bound_config,
)
from .model import SystemConfig

PRESETS = {
    "desk": dict(M=32, N=4, W=64),
    "paper-small": dict(M=128, N=10, W=256),
    "paper-large": dict(M=256, N=12, W=256),
}

CSV_COLUMNS = [
    "detector",
    "snr_db",
    "trials",
    "failures",
    "ber_mean",
    "ber_ci95",
    "ser_mean",
    "iters_mean",
    "inner_mean",
    "fft_mean",
    "wall_ms_mean",
    "converged_frac",
]

TRIAL_COLUMNS = [
    "detector",
    "snr_db",
    "trial_id",
    "ber",
    "ser",
    "outer_iters",
    "total_inner_iters",
    "fft_count",
    "wall_ms",
    "converged",
    "failed",
    "error",
]


def _content_hash(payload):
    """Git-style blob hash of the canonical JSON serialization."""
    data = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def _atomic_write(path, text):
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _load_config_file(path):
    with open(path, "rb") as fh:
        if path.endswith(".json"):
            return json.load(io.TextIOWrapper(fh, encoding="utf-8"))
        return tomllib.load(fh)


def _resolve_config(args):
    """Config precedence: built-in defaults < preset < file < flags.
    File keys are case-insensitive (m/M, wp/Wp, ...)."""
    field_map = {f.name.lower(): f.name for f in dataclasses.fields(SystemConfig)}
    values = {}
    if getattr(args, "preset", None):
        values.update(PRESETS[args.preset])
    if getattr(args, "config", None):
        raw = _load_config_file(args.config)
        system = raw.get("system", raw)
        unknown = sorted(k for k in system if k.lower() not in field_map)
        if unknown:
            raise SystemExit2(f"unknown config keys: {unknown}")
        values.update({field_map[k.lower()]: v for k, v in system.items()})
    if getattr(args, "seed", None) is not None:
        values["seed"] = args.seed
    if getattr(args, "sigma0", None) is not None:
        values["sigma0"] = args.sigma0
    return SystemConfig(**values)


class SystemExit2(Exception):
    """Usage error surfaced with exit code 2."""


def _workers(args):
    if args.workers is not None:
        return args.workers
    env = os.environ.get("OBIT_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise SystemExit2(f"OBIT_WORKERS must be an integer, got {env!r}") from exc
    return 1


def cmd_simulate(args):
    cfg = _resolve_config(args)
    spec_kwargs = {}
    if args.detector == "diem" and args.diem_params:
        spec_kwargs["diem_params"] = load_params(args.diem_params)
    elif args.detector == "diem":
        print(
            "warning: no --diem-params given; using the untrained per-instance defaults",
            file=sys.stderr,
        )
    spec = DetectorSpec(args.detector, **spec_kwargs)
    snrs = args.snr if args.snr is not None else [cfg.snr_db]
    workers = _workers(args)
    os.makedirs(args.out, exist_ok=True)

    t0 = time.time()
    rows, records = run_sweep(cfg, snrs, [spec], args.trials, workers=workers)
    elapsed = time.time() - t0

    out_csv = os.path.join(args.out, "aggregates.csv")
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([getattr(row, c) for c in CSV_COLUMNS])
    _atomic_write(out_csv, buf.getvalue())
    outputs = {"aggregates": out_csv}

    if args.per_trial:
        out_trials = os.path.join(args.out, "trials.csv")
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(TRIAL_COLUMNS)
        for rec in records:
            writer.writerow([getattr(rec, c) for c in TRIAL_COLUMNS])
        _atomic_write(out_trials, buf.getvalue())
        outputs["trials"] = out_trials

    resolved = {
        "command": "simulate",
        "cfg": dataclasses.asdict(cfg),
        "detector": args.detector,
        "snr_list": [float(s) for s in snrs],
        "trials": args.trials,
        "diem_params": args.diem_params,
        "per_trial": bool(args.per_trial),
    }
    manifest = {
        "tool": "obit",
        "version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "elapsed_s": elapsed,
        "workers": workers,
        "inputs": resolved,
        "input_hash": _content_hash(resolved),
        "outputs": outputs,
    }
    _atomic_write(os.path.join(args.out, "manifest.json"), json.dumps(manifest, indent=2))
    for row in rows:
        print(
            f"{row.detector} @ {row.snr_db:+.1f} dB: BER {row.ber_mean:.4g} "
            f"(+-{row.ber_ci95:.2g}), {row.iters_mean:.1f} iters, "
            f"{row.failures} failures"
        )
    return 0


def cmd_check_bounds(args):
    if args.instances < 1:
        raise SystemExit2("--instances must be at least 1")
    cfg = small_bound_config(seed=args.seed if args.seed is not None else 0)
    reports = run_bound_suite(cfg, args.instances)
    all_ok = all(r.all_satisfied for r in reports)
    resolved = {
        "command": "check-bounds",
        "cfg": dataclasses.asdict(cfg),
        "instances": args.instances,
    }
    payload = {
        "tool": "obit",
        "version": __version__,
        "inputs": resolved,
        "input_hash": _content_hash(resolved),
        "all_satisfied": all_ok,
        "reports": [r.to_dict() for r in reports],
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        _atomic_write(args.out, text)
    else:
        print(text)
    if args.out:
        n_curves = sum(len(r.curves) for r in reports)
        print(
            f"{'all bounds satisfied' if all_ok else 'BOUNDS VIOLATED'} "
            f"({n_curves} curves over {len(reports)} instances) -> {args.out}"
        )
    return 0 if all_ok else 1


def cmd_export_dataset(args):
    cfg = _resolve_config(args)
    snr_range = tuple(args.snr_range) if args.snr_range else None
    manifest = export_dataset(
        args.out,
        cfg,
        args.count,
        snr_range=snr_range,
        margin_db=args.margin_db,
        seed=args.seed,
    )
    print(
        f"wrote {manifest['count']} instances to {args.out} "
        f"(SNR {manifest['snr_range_with_margin_db'][0]:+.1f} to "
        f"{manifest['snr_range_with_margin_db'][1]:+.1f} dB incl. margin)"
    )
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="obit",
        description="One-bit MIMO-OFDM detection simulator",
        epilog=(
            "aggregates.csv columns: " + ", ".join(CSV_COLUMNS) + ". "
            "trials.csv columns (with --per-trial): " + ", ".join(TRIAL_COLUMNS) + "."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte-Carlo sweep")
    sim.add_argument("--config", help="TOML or JSON config file")
    sim.add_argument("--preset", choices=sorted(PRESETS), help="named system size")
    sim.add_argument("--detector", required=True, choices=DETECTOR_NAMES)
    sim.add_argument("--snr", type=float, nargs="+", help="SNR points in dB")
    sim.add_argument("--trials", type=int, default=200)
    sim.add_argument("--out", default="obit-out", help="output directory")
    sim.add_argument("--workers", type=int, help="parallel trial workers (or OBIT_WORKERS)")
    sim.add_argument("--per-trial", action="store_true", help="also write one row per trial")
    sim.add_argument("--diem-params", help="trained parameter file for the unfolded detector")
    sim.add_argument("--seed", type=int, help="override the config seed")
    sim.add_argument("--sigma0", type=float, help="override the noise-loading constant")
    sim.set_defaults(func=cmd_simulate)

    chk = sub.add_parser("check-bounds", help="verify the convergence bounds")
    chk.add_argument("--instances", type=int, default=20)
    chk.add_argument("--seed", type=int, default=0)
    chk.add_argument("--out", help="write the JSON report here instead of stdout")
    chk.set_defaults(func=cmd_check_bounds)

    exp = sub.add_parser("export-dataset", help="generate a training dataset")
    exp.add_argument("--config", help="TOML or JSON config file")
    exp.add_argument("--preset", choices=sorted(PRESETS))
    exp.add_argument("--count", type=int, required=True)
    exp.add_argument("--out", required=True, help="dataset directory")
    exp.add_argument("--snr-range", type=float, nargs=2, metavar=("LO", "HI"))
    exp.add_argument("--margin-db", type=float, default=3.0, help="training SNR margin")
    exp.add_argument("--seed", type=int, help="override the config seed")
    exp.add_argument("--sigma0", type=float, help="override the noise-loading constant")
    exp.set_defaults(func=cmd_export_dataset)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - runtime failure -> exit 1
        print(f"failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
