"""Parametric retargeting of an AIR's DRR and T60.

DRR: the early response is rescaled under a 5 ms Hann window centered on
the direct path; the gain is the maximum root of the quadratic that
equates the windowed-early energy to the target ratio times the late
energy. The direct path's time of arrival is protected by clipping the
gain whenever the late-field maximum would beat the scaled direct path.

T60: each third-octave subband has its two-stage decay model fitted and
its noise floor replaced with a synthesized clean late field, is then
reweighted by a growing or shrinking exponential toward the desired
decay rate, and the subbands are summed. The fullband variant scales all
subband rates by one ratio so the frequency-dependent decay shape is
preserved.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .air import Air, DEFAULT_TOLERANCE_S, find_direct_path, measure_drr, split_early_late
from .decay import (
    T60_LN,
    compute_envelope,
    fit_decay_model,
    measure_t60,
    noise_free_extended,
)
from .errors import AnechoicInputError, DecayFitError, NoSolutionError
from .filterbank import analyze, design_filterbank, synthesize
from .rng import TAG_BAND, generator

DIRECT_WINDOW_S = 0.005
_CLIP_MARGIN = 1e-6
_TAIL_FACTOR = 1.2


@dataclass(frozen=True)
class AugmentSpec:
    """Targets for one augmentation; at least one must be present."""

    target_t60: float | None = None
    target_drr: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.target_t60 is None and self.target_drr is None:
            raise ValueError("AugmentSpec needs a T60 or DRR target")
        if self.target_t60 is not None and not 0.0 < self.target_t60 <= 10.0:
            raise ValueError("target_t60 must lie in (0, 10] seconds")


@dataclass(frozen=True)
class AugmentReport:
    """What an augmentation actually achieved, re-measured on its output."""

    requested: AugmentSpec
    achieved_t60: float | None = None
    achieved_drr: float | None = None
    alpha: float | None = None
    clipped: bool = False

    def to_json_dict(self) -> dict:
        return {
            "requested": {
                "target_t60": self.requested.target_t60,
                "target_drr": self.requested.target_drr,
                "seed": self.requested.seed,
            },
            "achieved_t60": self.achieved_t60,
            "achieved_drr": self.achieved_drr,
            "alpha": self.alpha,
            "clipped": self.clipped,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def direct_window(length: int, sample_rate: int, direct_index: int) -> np.ndarray:
    """Full-length 5 ms Hann window with its peak on the direct path."""
    half = int(round(DIRECT_WINDOW_S * sample_rate / 2))
    taper = np.hanning(2 * half + 1)
    w = np.zeros(length)
    lo = max(0, direct_index - half)
    hi = min(length, direct_index + half + 1)
    w[lo:hi] = taper[lo - (direct_index - half) : hi - (direct_index - half)]
    return w


def solve_drr_gain(early: Air, late: Air, window: np.ndarray, target_db: float) -> float:
    """Maximum real root of the windowed-gain quadratic for a DRR target.

    Raises :class:`NoSolutionError` (carrying the discriminant) when the
    target lies below what the unscaled window residue allows.
    """
    he2 = early.samples**2
    late_energy = float(np.sum(late.samples**2))
    if late_energy <= 0:
        raise AnechoicInputError("late-field energy is zero")
    a = float(np.sum(window**2 * he2))
    b = 2.0 * float(np.sum((1.0 - window) * window * he2))
    c = float(np.sum((1.0 - window) ** 2 * he2)) - 10.0 ** (target_db / 10.0) * late_energy
    disc = b * b - 4.0 * a * c
    if disc < 0:
        raise NoSolutionError(
            f"no real gain reaches DRR {target_db:.2f} dB", discriminant=disc
        )
    return (-b + math.sqrt(disc)) / (2.0 * a)


def augment_drr(air: Air, target_db: float) -> tuple[Air, AugmentReport]:
    """Retarget the DRR by rescaling the windowed direct path.

    The late field is untouched. When the solved gain would let the late
    field outgrow the direct path, the gain is raised to the smallest
    dominance-restoring value (plus a relative margin) and the report is
    marked clipped; clipped outputs land above the requested target.
    """
    split = split_early_late(air, DEFAULT_TOLERANCE_S)
    he = split.early.samples
    hl = split.late.samples
    w = direct_window(len(air), air.sample_rate, split.direct_index)

    alpha = solve_drr_gain(split.early, split.late, w, target_db)

    # Direct-path dominance: the scaled direct sample must stay the global
    # maximum, or the time of arrival would move. The smallest restoring
    # gain must clear the late-field maximum and every other windowed
    # early sample; alpha is raised to it plus a relative margin.
    direct_mag = abs(he[split.direct_index])
    mag = np.abs(he)
    late_max = float(np.max(np.abs(hl)))
    need = late_max / direct_mag
    others = np.ones(len(he), dtype=bool)
    others[split.direct_index] = False
    others &= mag > 0
    if others.any():
        denom = direct_mag - w[others] * mag[others]
        bound = (1.0 - w[others]) * mag[others] / np.maximum(denom, 1e-300)
        need = max(need, float(np.max(bound)))
    clipped = False
    if alpha < need:
        alpha = need * (1.0 + _CLIP_MARGIN)
        clipped = True
    modified = (alpha * w + (1.0 - w)) * he

    out = air.with_samples(modified + hl)
    achieved = measure_drr(split_early_late(out, DEFAULT_TOLERANCE_S))
    report = AugmentReport(
        requested=AugmentSpec(target_drr=target_db),
        achieved_drr=achieved,
        alpha=alpha,
        clipped=clipped,
    )
    return out, report


def augment_t60_subband(
    band: Air, fitted_tau: float, desired_tau: float, onset: float
) -> Air:
    """Reweight one noise-floor-free subband toward a desired decay rate.

    Samples before the late-field onset are untouched; from the onset the
    band is multiplied by exp(-(t - t0) (tau - tau_d) / (tau tau_d)),
    which cancels the fitted decay and imposes the desired one.
    """
    if fitted_tau <= 0 or desired_tau <= 0:
        raise ValueError("decay rates must be positive")
    t = np.arange(len(band)) / band.sample_rate
    rate = (fitted_tau - desired_tau) / (fitted_tau * desired_tau)
    weight = np.ones(len(band))
    late = t >= onset
    weight[late] = np.exp(-(t[late] - onset) * rate)
    return band.with_samples(band.samples * weight)


def augment_t60_fullband(
    air: Air, target_t60: float, seed: int = 0
) -> tuple[Air, AugmentReport]:
    """Retarget the fullband T60 while preserving the per-band decay shape.

    Fits the fullband decay for the rate ratio, then per subband: fit,
    splice in a clean late field (extended so slower targets fit inside
    the output), reweight by the shared ratio, and sum. The achieved T60
    in the report is re-measured on the summed output.
    """
    if target_t60 <= 0:
        raise ValueError("target_t60 must be positive")
    fs = air.sample_rate
    split = split_early_late(air, DEFAULT_TOLERANCE_S)
    if float(np.sum(split.late.samples**2)) <= 0:
        raise AnechoicInputError("anechoic input: no late field to retarget")
    onset = split.direct_index / fs + DEFAULT_TOLERANCE_S

    model_full = fit_decay_model(compute_envelope(air), 1.0 / fs, onset=onset)
    tau_desired = target_t60 / T60_LN
    gamma = tau_desired / model_full.tau

    spec = design_filterbank(fs)
    bands = analyze(air, spec)
    out_len = max(len(air), int(math.ceil((onset + _TAIL_FACTOR * target_t60) * fs)))

    reweighted = []
    for m, band in enumerate(bands.bands):
        try:
            model_m = fit_decay_model(
                compute_envelope(band), 1.0 / fs, onset=onset, band_index=m
            )
        except DecayFitError as exc:
            exc.band_index = m
            raise
        band_seed = generator(seed, TAG_BAND, m).integers(0, 2**63 - 1)
        clean = noise_free_extended(band, model_m, int(band_seed), out_len)
        reweighted.append(
            augment_t60_subband(clean, model_m.tau, gamma * model_m.tau, onset)
        )

    out = synthesize(type(bands)(bands=tuple(reweighted), spec=spec))

    # Residual fullband trim: floor energy embedded ahead of each band's
    # splice reads the summed output a few percent fast at large stretch
    # ratios. The output is floor-free, so a direct fullband reweight is
    # stable; iterate until the re-measured T60 sits on the target.
    achieved = measure_t60(fit_decay_model(compute_envelope(out), 1.0 / fs, onset=onset))
    for _ in range(3):
        if abs(achieved - target_t60) / target_t60 <= 0.02:
            break
        out = augment_t60_subband(out, achieved / T60_LN, tau_desired, onset)
        achieved = measure_t60(
            fit_decay_model(compute_envelope(out), 1.0 / fs, onset=onset)
        )

    report = AugmentReport(
        requested=AugmentSpec(target_t60=target_t60, seed=seed),
        achieved_t60=achieved,
    )
    return out, report


def augment(air: Air, spec: AugmentSpec) -> tuple[Air, AugmentReport]:
    """Apply T60 then DRR retargeting and re-measure both on the output.

    T60 runs first because it changes late-field energy, and the exact
    DRR solve must see the final late field.
    """
    out = air
    alpha = None
    clipped = False
    if spec.target_t60 is not None:
        out, _ = augment_t60_fullband(out, spec.target_t60, seed=spec.seed)
    if spec.target_drr is not None:
        out, drr_report = augment_drr(out, spec.target_drr)
        alpha = drr_report.alpha
        clipped = drr_report.clipped

    fs = out.sample_rate
    onset = find_direct_path(out) / fs + DEFAULT_TOLERANCE_S
    try:
        achieved_t60 = measure_t60(
            fit_decay_model(compute_envelope(out), 1.0 / fs, onset=onset)
        )
    except DecayFitError:
        achieved_t60 = None
    achieved_drr = measure_drr(split_early_late(out, DEFAULT_TOLERANCE_S))
    report = AugmentReport(
        requested=spec,
        achieved_t60=achieved_t60,
        achieved_drr=achieved_drr,
        alpha=alpha,
        clipped=clipped,
    )
    return out, report
