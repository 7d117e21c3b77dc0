"""Compact CNN regressor with a hard parameter-count contract.

Six conv blocks (conv -> ReLU -> max pool -> batch norm): two 8-kernel
1x2 blocks, two 16-kernel 1x2 blocks, two 32-kernel 2x2 blocks; pooling
mirrors each conv's kernel. The first four blocks shrink time only,
until time and frequency are comparable; the last two shrink both. A
50% dropout and a single linear unit produce the scalar estimate.
Construction fails unless the parameter counts land exactly on the
contract (8737 trainable, 224 non-trainable), guarding against drift.
"""
from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

TRAINABLE_PARAMS = 8737
NON_TRAINABLE_PARAMS = 224


class ConstructionError(RuntimeError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    channels: tuple = (8, 8, 16, 16, 32, 32)
    kernels: tuple = ((1, 2), (1, 2), (1, 2), (1, 2), (2, 2), (2, 2))
    dropout: float = 0.5
    expected_trainable: int = TRAINABLE_PARAMS
    expected_non_trainable: int = NON_TRAINABLE_PARAMS


class BlindRegressor(nn.Module):
    def __init__(self, spec: ModelSpec = ModelSpec()):
        super().__init__()
        blocks = []
        in_ch = 1
        for out_ch, kernel in zip(spec.channels, spec.kernels):
            blocks += [
                nn.Conv2d(in_ch, out_ch, kernel),
                nn.ReLU(),
                nn.MaxPool2d(kernel),
                nn.BatchNorm2d(out_ch),
            ]
            in_ch = out_ch
        self.blocks = nn.Sequential(*blocks)
        self.dropout = nn.Dropout(spec.dropout)
        self.head = nn.LazyLinear(1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = self.blocks(x)
        x = self.dropout(torch.flatten(x, 1))
        return self.head(x).squeeze(-1)


def parameter_counts(model: nn.Module) -> tuple:
    """(trainable, non-trainable): weights vs float buffers.

    Batch-norm running statistics are the non-trainable parameters;
    integer step counters are bookkeeping and excluded.
    """
    trainable = sum(p.numel() for p in model.parameters() if p.requires_grad)
    non_trainable = sum(p.numel() for p in model.parameters() if not p.requires_grad)
    non_trainable += sum(
        b.numel() for b in model.buffers() if b.is_floating_point()
    )
    return trainable, non_trainable


def build_model(spec: ModelSpec = ModelSpec(), input_shape: tuple = (32, 499)) -> BlindRegressor:
    """Construct the regressor and enforce the parameter contract."""
    model = BlindRegressor(spec)
    with torch.no_grad():
        model.eval()
        model(torch.zeros(1, 1, *input_shape))  # materializes the linear head
    trainable, non_trainable = parameter_counts(model)
    if (trainable, non_trainable) != (spec.expected_trainable, spec.expected_non_trainable):
        raise ConstructionError(
            f"parameter contract violated: got {trainable} trainable / "
            f"{non_trainable} non-trainable, expected "
            f"{spec.expected_trainable} / {spec.expected_non_trainable}"
        )
    return model
