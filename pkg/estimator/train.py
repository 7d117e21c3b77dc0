#!/usr/bin/env python3
"""Train the blind estimator on a dataset manifest.

Usage:
  python3 train.py --manifest dataset/manifest.jsonl --target t60 --out ckpt/
"""
import argparse
import sys

from air_estimator.training import train


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--manifest", required=True, help="manifest.jsonl path")
    parser.add_argument("--target", required=True, choices=["t60", "drr"])
    parser.add_argument("--out", required=True, help="checkpoint directory")
    parser.add_argument("--epochs", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    result = train(args.manifest, args.target, args.out,
                   epochs=args.epochs, seed=args.seed)
    print(f"best epoch {result.best_epoch}: val MSE {result.best_val:.5f}")
    print(f"checkpoint: {result.checkpoint}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
