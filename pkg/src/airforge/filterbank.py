"""Zero-phase power-complementary third-octave filterbank.

Bands come from a chain of complementary Butterworth crossovers applied
forward-backward: at each band edge the remainder is split by a
lowpass/highpass pair with the same cutoff and order, whose squared
magnitudes sum to one. The zero-phase band responses therefore tile the
spectrum exactly, so summing the subbands reconstructs the input.
Edges sit at the geometric midpoints between third-octave centers; the
lowest band runs down to DC and the highest up to Nyquist.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .air import Air
from .errors import FilterbankDesignError

ANCHOR_HZ = 1000.0  # standard third-octave anchor; lowest center 99.2 Hz
LOW_BAND_INDEX = -10
CENTER_RATIO = 2.0 ** (1.0 / 3.0)
EDGE_RATIO = 2.0 ** (1.0 / 6.0)
PROTOTYPE_ORDER = 6
_RIPPLE_LIMIT_DB = 1.0
_VERIFY_LOW_HZ = 100.0


@dataclass(frozen=True)
class FilterbankSpec:
    """Third-octave band layout for one sample rate."""

    sample_rate: int
    center_frequencies: tuple
    prototype_order: int = PROTOTYPE_ORDER

    def __post_init__(self):
        centers = np.asarray(self.center_frequencies, dtype=np.float64)
        if np.any(np.diff(centers) <= 0):
            raise FilterbankDesignError("centers must be strictly increasing")
        if centers[-1] >= self.sample_rate / 2:
            raise FilterbankDesignError("centers must lie below Nyquist")
        ratios = centers[1:] / centers[:-1]
        if np.any(np.abs(ratios / CENTER_RATIO - 1.0) > 1e-3):
            raise FilterbankDesignError("adjacent centers must be a third octave apart")
        object.__setattr__(self, "center_frequencies", tuple(float(c) for c in centers))

    @property
    def n_bands(self) -> int:
        return len(self.center_frequencies)

    def edges(self) -> list:
        """Interior band edges: geometric midpoints between centers."""
        c = self.center_frequencies
        return [c[m] * EDGE_RATIO for m in range(len(c) - 1)]

    def to_json(self) -> str:
        return json.dumps(
            {
                "sample_rate": self.sample_rate,
                "center_frequencies": list(self.center_frequencies),
                "prototype_order": self.prototype_order,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "FilterbankSpec":
        rec = json.loads(text)
        return cls(
            sample_rate=rec["sample_rate"],
            center_frequencies=tuple(rec["center_frequencies"]),
            prototype_order=rec["prototype_order"],
        )


@dataclass(frozen=True)
class SubbandSet:
    """One filtered signal per band, all the length of the analyzed input."""

    bands: tuple
    spec: FilterbankSpec


def _crossover_sos(spec: FilterbankSpec):
    """(lowpass, highpass) second-order sections for each interior edge."""
    pairs = []
    for edge in spec.edges():
        lp = sps.butter(spec.prototype_order, edge, btype="lowpass",
                        fs=spec.sample_rate, output="sos")
        hp = sps.butter(spec.prototype_order, edge, btype="highpass",
                        fs=spec.sample_rate, output="sos")
        pairs.append((lp, hp))
    return pairs


def band_responses(spec: FilterbankSpec, freqs: np.ndarray) -> np.ndarray:
    """Effective zero-phase response of every band on a frequency grid.

    Row m is the squared prototype magnitude of band m, i.e. the gain the
    forward-backward filtering applies at each frequency.
    """
    freqs = np.asarray(freqs, dtype=np.float64)
    remainder = np.ones_like(freqs)
    rows = []
    for lp, hp in _crossover_sos(spec):
        lp_pow = np.abs(sps.sosfreqz(lp, worN=freqs, fs=spec.sample_rate)[1]) ** 2
        hp_pow = np.abs(sps.sosfreqz(hp, worN=freqs, fs=spec.sample_rate)[1]) ** 2
        rows.append(remainder * lp_pow)
        remainder = remainder * hp_pow
    rows.append(remainder)
    return np.array(rows)


def _power_sum_ripple_db(spec: FilterbankSpec) -> float:
    """Worst deviation of the summed band responses from unity, in dB,
    over 100 Hz-0.375x sample rate."""
    freqs = np.geomspace(_VERIFY_LOW_HZ, 0.375 * spec.sample_rate, 512)
    total = band_responses(spec, freqs).sum(axis=0)
    return float(np.max(np.abs(10.0 * np.log10(total))))


def _pad_len(sos: np.ndarray) -> int:
    """Reflection-padding length: 3x the filter's 60 dB decay length."""
    poles = []
    for section in sos:
        poles.extend(np.roots(section[3:]))
    radius = max(abs(p) for p in poles)
    radius = min(radius, 1.0 - 1e-12)
    n60 = math.log(1000.0) / -math.log(radius)
    return int(3 * math.ceil(n60))


def _filtfilt(sos: np.ndarray, x: np.ndarray) -> np.ndarray:
    padlen = min(_pad_len(sos), x.size - 1)
    return sps.sosfiltfilt(sos, x, padlen=padlen)


def design_filterbank(sample_rate: int) -> FilterbankSpec:
    """Third-octave centers from 100 Hz up to just below 0.4x sample rate.

    The returned design is numerically verified: the summed zero-phase
    band responses must stay within 1 dB of unity across
    100 Hz-0.375x sample rate or the design is rejected.
    """
    if sample_rate < 8000:
        raise FilterbankDesignError("sample_rate must be at least 8000 Hz")
    centers = []
    k = LOW_BAND_INDEX
    while True:
        c = ANCHOR_HZ * CENTER_RATIO**k
        if c >= 0.4 * sample_rate:
            break
        centers.append(c)
        k += 1
    if len(centers) < 3:
        raise FilterbankDesignError("sample rate too low to host 3 third-octave bands")
    spec = FilterbankSpec(sample_rate=int(sample_rate), center_frequencies=tuple(centers))
    ripple = _power_sum_ripple_db(spec)
    if ripple > _RIPPLE_LIMIT_DB:
        raise FilterbankDesignError(
            f"power-complementarity ripple {ripple:.2f} dB exceeds {_RIPPLE_LIMIT_DB} dB"
        )
    return spec


def analyze(air: Air, spec: FilterbankSpec) -> SubbandSet:
    """Split ``air`` into zero-phase subbands.

    Implemented as the sequential crossover chain; each band also equals
    an independent forward-backward cascade (all highpasses below its
    lower edge plus its upper-edge lowpass) applied to the input, so
    bands can be recomputed in isolation.
    """
    if air.sample_rate != spec.sample_rate:
        raise ValueError(
            f"sample rate mismatch: air {air.sample_rate} vs spec {spec.sample_rate}"
        )
    bands = []
    remainder = air.samples
    for lp, hp in _crossover_sos(spec):
        bands.append(air.with_samples(_filtfilt(lp, remainder)))
        remainder = _filtfilt(hp, remainder)
    bands.append(air.with_samples(remainder))
    return SubbandSet(bands=tuple(bands), spec=spec)


def synthesize(subbands: SubbandSet) -> Air:
    """Sum the subbands back into one signal."""
    bands = subbands.bands
    if not bands:
        raise ValueError("empty band set")
    n = len(bands[0])
    if any(len(b) != n for b in bands):
        raise ValueError("subband lengths differ")
    total = np.zeros(n)
    for band in bands:
        total += band.samples
    return bands[0].with_samples(total)
