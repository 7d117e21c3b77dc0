"""Paired-estimate evaluation: bias, MSE, and Pearson correlation."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class EvalStats:
    """Error statistics of estimates against labels.

    ``pearson`` is NaN (and flagged undefined) when the labels are
    constant.
    """

    bias: float
    mse: float
    pearson: float
    n: int

    @property
    def pearson_defined(self) -> bool:
        return not math.isnan(self.pearson)


def evaluate(estimates, labels) -> EvalStats:
    """bias = mean(e - l); mse = mean((e - l)^2); pearson = sample correlation."""
    e = np.asarray(estimates, dtype=np.float64)
    l = np.asarray(labels, dtype=np.float64)
    if e.shape != l.shape or e.ndim != 1:
        raise DataError("estimates and labels must be 1-D and the same length")
    if e.size < 2:
        raise DataError("need at least two paired values")
    diff = e - l
    bias = float(np.mean(diff))
    mse = float(np.mean(diff**2))
    se = float(np.std(e, ddof=1))
    sl = float(np.std(l, ddof=1))
    if sl == 0.0 or se == 0.0:
        pearson = float("nan")
    else:
        cov = float(np.sum((e - e.mean()) * (l - l.mean()))) / (e.size - 1)
        pearson = cov / (se * sl)
    return EvalStats(bias=bias, mse=mse, pearson=pearson, n=int(e.size))


def report(stats: EvalStats, fmt: str = "text", method: str = "estimator") -> str:
    """Render stats as text/csv (4-decimal) or full-precision JSON."""
    if fmt == "json":
        return json.dumps(
            {
                "method": method,
                "bias": stats.bias,
                "mse": stats.mse,
                "pearson": stats.pearson,
                "n": stats.n,
            }
        )
    if fmt == "csv":
        return (
            "method,bias,mse,pearson,n\n"
            f"{method},{stats.bias:.4f},{stats.mse:.4f},{stats.pearson:.4f},{stats.n}\n"
        )
    if fmt == "text":
        return (
            f"method:  {method}\n"
            f"bias:    {stats.bias:.4f}\n"
            f"mse:     {stats.mse:.4f}\n"
            f"pearson: {stats.pearson:.4f}\n"
            f"n:       {stats.n}\n"
        )
    raise ValueError(f"unknown report format {fmt!r}")


def stats_from_json(text: str) -> EvalStats:
    rec = json.loads(text)
    return EvalStats(bias=rec["bias"], mse=rec["mse"], pearson=rec["pearson"], n=rec["n"])
