"""Impulse-response container, direct-path localization, and DRR.

An acoustic impulse response (AIR) is split around the direct-path
arrival into an early response (a +/-2.5 ms tolerance window) and the
late-field remainder; the direct-to-reverberant ratio is the energy
ratio of the two parts in dB.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AnechoicInputError, DegenerateInputError

DEFAULT_TOLERANCE_S = 0.0025


@dataclass(frozen=True)
class Air:
    """A single-channel impulse response with its sample rate.

    Samples are held as float64 regardless of file bit depth; the decay
    fits and gain solves downstream are precision-sensitive.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise DegenerateInputError("Air requires a 1-D sample array")
        if not np.all(np.isfinite(samples)):
            raise DegenerateInputError("Air samples must be finite")
        if int(self.sample_rate) <= 0:
            raise DegenerateInputError("sample_rate must be positive")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        """Length in seconds."""
        return self.samples.size / self.sample_rate

    def with_samples(self, samples: np.ndarray) -> "Air":
        """New Air at the same rate."""
        return Air(samples, self.sample_rate)


@dataclass(frozen=True)
class EarlyLateSplit:
    """Exact partition of an AIR around its direct path.

    ``early`` is nonzero only on [direct - tolerance, direct + tolerance]
    (clipped at the signal edges); ``late`` is the remainder, so
    early + late reconstructs the source sample-for-sample.
    """

    early: Air
    late: Air
    direct_index: int
    tolerance: float = field(default=DEFAULT_TOLERANCE_S)


def find_direct_path(air: Air) -> int:
    """Index of the direct-path arrival: argmax of |h(t)|, earliest on ties."""
    mag = np.abs(air.samples)
    if not mag.any():
        raise DegenerateInputError("all-zero signal has no direct path")
    return int(np.argmax(mag))


def split_early_late(air: Air, tolerance: float = DEFAULT_TOLERANCE_S) -> EarlyLateSplit:
    """Partition ``air`` into early and late responses.

    The early window spans ``tolerance`` seconds either side of the
    direct path and is clipped (not reflected) at the signal edges so the
    partition identity holds exactly.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    direct = find_direct_path(air)
    half = int(round(tolerance * air.sample_rate))
    lo = max(0, direct - half)
    hi = min(len(air), direct + half + 1)

    early = np.zeros_like(air.samples)
    early[lo:hi] = air.samples[lo:hi]
    late = air.samples.copy()
    late[lo:hi] = 0.0
    return EarlyLateSplit(
        early=air.with_samples(early),
        late=air.with_samples(late),
        direct_index=direct,
        tolerance=tolerance,
    )


def measure_drr(split: EarlyLateSplit) -> float:
    """Direct-to-reverberant ratio in dB: 10 log10(sum he^2 / sum hl^2)."""
    early_energy = float(np.sum(split.early.samples**2))
    late_energy = float(np.sum(split.late.samples**2))
    if late_energy <= 0.0:
        raise AnechoicInputError("late-field energy is zero; DRR undefined")
    if early_energy <= 0.0:
        return -np.inf
    return 10.0 * np.log10(early_energy / late_energy)
