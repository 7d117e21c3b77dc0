#!/usr/bin/env python3
"""Run the blind estimator on audio.

Single file (JSON to stdout):
  python3 infer.py --ckpt ckpt/t60_model.pt --in clip.wav --json

Batch over a manifest (CSV for the dataset tool's eval subcommand):
  python3 infer.py --ckpt ckpt/t60_model.pt --manifest dataset/manifest.jsonl \
      --partition test --out pred.csv
"""
import argparse
import csv
import json
import sys
from pathlib import Path

from air_estimator.data import load_manifest, read_wav
from air_estimator.inference import infer, load_checkpoint


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--ckpt", required=True)
    parser.add_argument("--in", dest="input", help="single WAV file")
    parser.add_argument("--json", action="store_true", help="emit JSON")
    parser.add_argument("--manifest", help="manifest.jsonl for batch mode")
    parser.add_argument("--partition", default="test")
    parser.add_argument("--out", help="predictions CSV (batch mode)")
    args = parser.parse_args()

    model, meta = load_checkpoint(args.ckpt)
    target = meta["target"]
    norm = {"feat_mean": meta["feat_mean"], "feat_std": meta["feat_std"]}

    if args.input:
        samples, rate = read_wav(args.input)
        result = infer(model, samples, rate, **norm)
        if args.json:
            print(json.dumps({"target": target, **result}))
        else:
            print(f"{result['estimate']:.4f} ({target}, {result['n_windows']} windows)")
        return 0

    if args.manifest and args.out:
        rows = [r for r in load_manifest(args.manifest, target)
                if r.partition == args.partition]
        root = Path(args.manifest).parent
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["file", "estimate"])
            for row in rows:
                samples, rate = read_wav(root / row.file)
                writer.writerow([row.file, f"{infer(model, samples, rate, **norm)['estimate']:.6f}"])
        print(f"wrote {len(rows)} predictions to {args.out}")
        return 0

    parser.error("need --in FILE or (--manifest and --out)")


if __name__ == "__main__":
    sys.exit(main())
