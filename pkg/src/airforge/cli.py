"""Command-line entry point: air-forge <subcommand>.

Exit codes: 0 success, 2 usage/validation error, 3 data error,
4 numeric failure. Every error is also emitted as a structured log line.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from .air import DEFAULT_TOLERANCE_S, find_direct_path, measure_drr, split_early_late
from .augment import AugmentSpec, augment
from .config import load_config
from .dataset import Calibration, MixRecipe, build_dataset, mix_sample
from .decay import compute_envelope, fit_decay_model, measure_t60
from .errors import AirForgeError, DataError, NumericError
from .evaluate import evaluate, report
from .levels import active_speech_level, lufs_level, rms_level
from .wavio import read_wav, write_wav

log = logging.getLogger("airforge")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="air-forge",
        description="Parametric T60/DRR retargeting of AIRs and dataset synthesis",
    )
    parser.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="measure T60 and DRR of an AIR")
    p.add_argument("input", help="AIR WAV file")
    p.add_argument("--calibration", help="JSON file with t60/drr slope+intercept maps")
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")

    p = sub.add_parser("augment", help="retarget T60 and/or DRR of an AIR")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--t60", type=float, help="target T60 in seconds")
    p.add_argument("--drr", type=float, help="target DRR in dB")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", help="write the achieved-values report as JSON")

    p = sub.add_parser("level", help="measure a level or loudness")
    p.add_argument("input")
    p.add_argument("--method", required=True, choices=["p56", "rms", "lufs"])

    p = sub.add_parser("mix", help="mix one dataset row from explicit parts")
    p.add_argument("--speech", required=True)
    p.add_argument("--air", required=True)
    p.add_argument("--noise", required=True)
    p.add_argument("--snr", type=float, required=True)
    p.add_argument("--noise-shift", type=int, required=True)
    p.add_argument("--segment-start", type=int, required=True)
    p.add_argument("--segment-seconds", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", dest="output", required=True)

    p = sub.add_parser("gen-dataset", help="synthesize a labeled dataset")
    p.add_argument("--config", required=True, help="JSON config (see shipped schema)")
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--workers", type=int,
                   default=int(os.environ.get("AIR_FORGE_THREADS", "0")) or None,
                   help="overrides config workers; default from AIR_FORGE_THREADS")

    p = sub.add_parser("eval", help="score predictions against manifest labels")
    p.add_argument("--pred", required=True, help="CSV with header file,estimate")
    p.add_argument("--labels", required=True, help="manifest.jsonl with label columns")
    p.add_argument("--param", required=True, choices=["t60", "drr"])
    p.add_argument("--format", default="text", choices=["text", "json", "csv"])
    return parser


def _load_calibrations(path):
    with open(path) as fh:
        rec = json.load(fh)
    return (
        Calibration(**rec.get("t60", {})),
        Calibration(**rec.get("drr", {})),
    )


def _cmd_analyze(args) -> int:
    air = read_wav(args.input)
    onset = find_direct_path(air) / air.sample_rate + DEFAULT_TOLERANCE_S
    t60 = measure_t60(fit_decay_model(compute_envelope(air), 1.0 / air.sample_rate, onset=onset))
    drr = measure_drr(split_early_late(air, DEFAULT_TOLERANCE_S))
    calibrated = False
    if args.calibration:
        cal_t60, cal_drr = _load_calibrations(args.calibration)
        t60 = float(cal_t60.apply(t60))
        drr = float(cal_drr.apply(drr))
        calibrated = True
    label = "calibrated" if calibrated else "raw"
    if args.json:
        print(json.dumps({"t60_s": t60, "drr_db": drr, "calibrated": calibrated}))
    else:
        print(f"T60: {t60:.4f} s ({label})")
        print(f"DRR: {drr:.4f} dB ({label})")
    return EXIT_OK


def _cmd_augment(args, parser) -> int:
    if args.t60 is None and args.drr is None:
        parser.error("augment needs --t60 and/or --drr")
    if args.t60 is not None and not 0.0 < args.t60 <= 10.0:
        parser.error("--t60 must lie in (0, 10] seconds")
    air = read_wav(args.input)
    out, rep = augment(air, AugmentSpec(target_t60=args.t60, target_drr=args.drr,
                                        seed=args.seed))
    write_wav(args.output, out)
    if args.report:
        Path(args.report).write_text(rep.to_json())
    log.info("augment wrote %s (t60=%s drr=%s clipped=%s)",
             args.output, rep.achieved_t60, rep.achieved_drr, rep.clipped)
    return EXIT_OK


def _cmd_level(args) -> int:
    air = read_wav(args.input)
    rep = {"p56": active_speech_level, "rms": rms_level, "lufs": lufs_level}[args.method](air)
    unit = {"p56_active": "dBov", "rms": "dBFS", "lufs_integrated": "LUFS"}[rep.method]
    print(f"{rep.value:.4f} {unit} ({rep.method})")
    return EXIT_OK


def _cmd_mix(args) -> int:
    recipe = MixRecipe(
        speech_ref=args.speech,
        air_ref=args.air,
        noise_ref=args.noise,
        snr=args.snr,
        noise_shift=args.noise_shift,
        segment_start=args.segment_start,
        seed=args.seed,
    )
    mixture = mix_sample(
        recipe,
        read_wav(args.speech),
        read_wav(args.air),
        read_wav(args.noise),
        args.segment_seconds,
    )
    write_wav(args.output, mixture)
    return EXIT_OK


def _cmd_gen_dataset(args) -> int:
    config = load_config(args.config)
    if args.workers:
        config["workers"] = args.workers
    manifest = build_dataset(config, args.output)
    log.info("wrote %d rows to %s", len(manifest.rows), args.output)
    print(f"rows: {len(manifest.rows)}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    with open(args.pred, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "file" not in rows[0] or "estimate" not in rows[0]:
        raise DataError("predictions CSV must have header: file,estimate")
    preds = {r["file"]: float(r["estimate"]) for r in rows}

    labels = {}
    with open(args.labels) as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                labels[rec["file"]] = rec[f"label_{args.param}"]
    common = sorted(set(preds) & set(labels))
    if len(common) < 2:
        raise DataError("fewer than two files shared between predictions and labels")
    stats = evaluate([preds[f] for f in common], [labels[f] for f in common])
    sys.stdout.write(report(stats, fmt=args.format, method=args.param))
    return EXIT_OK


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="level=%(levelname)s module=%(name)s msg=%(message)s",
    )
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "augment":
            return _cmd_augment(args, parser)
        if args.command == "level":
            return _cmd_level(args)
        if args.command == "mix":
            return _cmd_mix(args)
        if args.command == "gen-dataset":
            return _cmd_gen_dataset(args)
        if args.command == "eval":
            return _cmd_eval(args)
        parser.error(f"unknown command {args.command!r}")
    except SystemExit as exc:  # parser.error inside command validation
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    except NumericError as exc:
        log.error("numeric failure: %s", exc)
        return EXIT_NUMERIC
    except (DataError, FileNotFoundError, OSError, ValueError) as exc:
        log.error("data error: %s", exc)
        return EXIT_DATA
    except AirForgeError as exc:
        log.error("error: %s", exc)
        return EXIT_DATA
    return EXIT_OK


def main() -> None:
    sys.exit(run())
