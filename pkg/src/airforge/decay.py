"""Two-stage decay-model fitting, T60, and noise-floor removal.

The late field of a (sub)band signal is modeled as an exponential decay
with an additive stationary floor. Its energy envelope in dB is

    10 log10(A^2 exp(-2 (t - t0) / tau) + sigma^2)

and the model is fit to a measured envelope by simplex descent over
(log A, log tau, log sigma). T60 follows as ln(1000) * tau. Floor
removal splices a synthesized noise-free late field onto the original at
the detected decay/floor crossing.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .air import Air
from .errors import DecayFitError, DegenerateInputError
from .rng import gaussian, generator

T60_LN = float(np.log(1000.0))

ENVELOPE_FLOOR_DB = -120.0
FRAME_LEN_S = 0.010
FRAME_HOP_S = 0.005
CROSSFADE_S = 0.010

_MAX_ITER = 500
_XATOL = 1e-4
_FIT_SPAN_MIN_S = 0.100


@dataclass(frozen=True)
class EnergyEnvelope:
    """Framewise energy of a signal in dB."""

    frames: np.ndarray
    frame_hop: float
    frame_len: float

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if not np.all(np.isfinite(frames)):
            raise DegenerateInputError("envelope frames must be finite")
        if self.frame_hop <= 0:
            raise DegenerateInputError("frame_hop must be positive")
        object.__setattr__(self, "frames", frames)

    def times(self) -> np.ndarray:
        """Frame-center times in seconds."""
        return np.arange(self.frames.size) * self.frame_hop + self.frame_len / 2.0

    @property
    def span(self) -> float:
        """Time of the last frame center."""
        return float(self.times()[-1]) if self.frames.size else 0.0


@dataclass(frozen=True)
class FitDiagnostics:
    rms_db: float
    iterations: int
    converged: bool
    restarts: int
    decay_unresolved: bool  # no decaying segment: tau outlasts the span
    # or the decay never clears the floor for a single frame


@dataclass(frozen=True)
class DecayModel:
    """Fitted (level, tau, floor, onset) of the two-stage envelope model."""

    level: float
    tau: float
    noise_floor: float
    onset: float
    sample_period: float
    band_index: int = 0
    diagnostics: FitDiagnostics | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.level < 0 or self.noise_floor < 0:
            raise ValueError("level and noise_floor must be nonnegative")
        if self.sample_period <= 0:
            raise ValueError("sample_period must be positive")

    def t60(self) -> float:
        """Reverberation time in seconds: ln(1000) * tau."""
        return T60_LN * self.tau

    def envelope_db(self, times: np.ndarray) -> np.ndarray:
        """Model energy envelope in dB at the given times."""
        return _model_db(
            math.log(max(self.level, 1e-300)),
            math.log(self.tau),
            math.log(max(self.noise_floor, 1e-300)),
            np.asarray(times),
            self.onset,
        )

    def to_json_dict(self) -> dict:
        rec = {
            "band_index": self.band_index,
            "level": self.level,
            "tau_s": self.tau,
            "t60_s": self.t60(),
            "noise_floor": self.noise_floor,
            "onset_s": self.onset,
            "sample_period_s": self.sample_period,
        }
        if self.diagnostics is not None:
            rec["fit"] = {
                "rms_db": self.diagnostics.rms_db,
                "iterations": self.diagnostics.iterations,
                "converged": self.diagnostics.converged,
                "restarts": self.diagnostics.restarts,
                "decay_unresolved": self.diagnostics.decay_unresolved,
            }
        return rec

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def compute_envelope(
    signal: Air,
    frame_len: float = FRAME_LEN_S,
    frame_hop: float = FRAME_HOP_S,
) -> EnergyEnvelope:
    """Per-frame 10 log10(mean squared amplitude), floored at -120 dB."""
    if not frame_len >= frame_hop > 0:
        raise ValueError("require frame_len >= frame_hop > 0")
    win = int(round(frame_len * signal.sample_rate))
    hop = int(round(frame_hop * signal.sample_rate))
    x = signal.samples
    if x.size < win:
        raise DegenerateInputError("signal shorter than one envelope frame")
    n_frames = 1 + (x.size - win) // hop
    idx = np.arange(win)[None, :] + hop * np.arange(n_frames)[:, None]
    power = np.mean(x[idx] ** 2, axis=1)
    floor = 10.0 ** (ENVELOPE_FLOOR_DB / 10.0)
    frames = 10.0 * np.log10(np.maximum(power, floor))
    return EnergyEnvelope(frames=frames, frame_hop=hop / signal.sample_rate,
                          frame_len=win / signal.sample_rate)


def _model_db(log_a, log_tau, log_sig, times, onset):
    dt = np.maximum(times - onset, 0.0)
    decay = 2.0 * log_a - 2.0 * dt / math.exp(log_tau)
    return (10.0 / math.log(10.0)) * np.logaddexp(decay, 2.0 * log_sig)


def _two_piece_init(times, frames, onset):
    """Initial (log A, log tau, log sigma) from a two-piece linear read.

    Tail median gives the floor, the early slope gives tau, and the
    intercept extrapolated to the onset gives the level.
    """
    n = times.size
    n_tail = max(3, n // 5)
    sigma_db = float(np.median(frames[-n_tail:]))

    decay_end = n
    for k in range(n):
        if frames[k] < sigma_db + 10.0:
            decay_end = k
            break
    decay_end = max(decay_end, min(5, n))
    t_fit = times[:decay_end]
    f_fit = frames[:decay_end]
    if t_fit.size >= 2 and np.ptp(t_fit) > 0:
        slope, intercept = np.polyfit(t_fit, f_fit, 1)
    else:
        slope, intercept = 0.0, float(np.mean(f_fit))

    span = float(times[-1] - onset)
    if slope < -1e-6:
        tau0 = 2.0 * (10.0 / math.log(10.0)) / (-slope)
    else:
        tau0 = 10.0 * span
    tau0 = float(np.clip(tau0, 1e-4, 100.0 * span))
    level_db = intercept + slope * onset
    log_a = math.log(10.0) * level_db / 20.0
    log_sig = math.log(10.0) * sigma_db / 20.0
    return np.array([log_a, math.log(tau0), log_sig])


def fit_decay_model(
    env: EnergyEnvelope,
    sample_period: float,
    onset: float | None = None,
    band_index: int = 0,
) -> DecayModel:
    """Fit the two-stage model to a measured envelope.

    ``onset`` is the late-field onset time in seconds; when omitted it is
    taken 2.5 ms after the envelope maximum. Frames whose window overlaps
    the onset are excluded so the direct-path spike cannot leak into the
    late-field fit. Raises :class:`DecayFitError` (carrying the
    best-so-far model) if no simplex start converges within budget.
    """
    if sample_period <= 0:
        raise ValueError("sample_period must be positive")
    times_all = env.times()
    if onset is None:
        onset = float(times_all[int(np.argmax(env.frames))]) + 0.0025
    sel = times_all - env.frame_len / 2.0 >= onset
    times = times_all[sel]
    frames = env.frames[sel]
    if times.size < 4 or times[-1] - onset < _FIT_SPAN_MIN_S:
        raise DegenerateInputError(
            "envelope must span at least 100 ms beyond the late-field onset"
        )

    x0 = _two_piece_init(times, frames, onset)

    def objective(x):
        resid = _model_db(x[0], x[1], x[2], times, onset) - frames
        return float(np.mean(resid**2))

    starts = [
        x0,
        x0 + np.array([0.0, 0.0, -math.log(10.0)]),
        x0 + np.array([0.0, math.log(2.0), math.log(10.0)]),
        x0 + np.array([0.0, -math.log(2.0), 0.0]),
    ]
    best = None
    iterations = 0
    restarts = 0
    for i, start in enumerate(starts):
        res = optimize.minimize(
            objective,
            start,
            method="Nelder-Mead",
            options={"maxiter": _MAX_ITER, "xatol": _XATOL, "fatol": 1e-7},
        )
        iterations += res.nit
        restarts = i
        if best is None or res.fun < best.fun:
            best = res
        # A converged fit already at the envelope's own noise level does
        # not improve with more starts.
        if res.success and math.sqrt(res.fun) < 2.0:
            break

    log_a, log_tau, log_sig = best.x
    span = float(times[-1] - onset)
    tau_fit = math.exp(log_tau)
    rise = tau_fit * max(log_a - log_sig, 0.0)  # time the decay spends above the floor
    diagnostics = FitDiagnostics(
        rms_db=float(math.sqrt(best.fun)),
        iterations=int(iterations),
        converged=bool(best.success),
        restarts=restarts,
        decay_unresolved=bool(tau_fit > span or rise < env.frame_len),
    )
    model = DecayModel(
        level=math.exp(log_a),
        tau=math.exp(log_tau),
        noise_floor=math.exp(log_sig),
        onset=float(onset),
        sample_period=sample_period,
        band_index=band_index,
        diagnostics=diagnostics,
    )
    if not best.success:
        raise DecayFitError(
            f"decay fit did not converge within {_MAX_ITER} iterations",
            model=model,
            band_index=band_index,
        )
    return model


def measure_t60(model: DecayModel) -> float:
    """T60 in seconds from a fitted model."""
    return model.t60()


def detect_noise_floor_onset(model: DecayModel, duration: float | None = None) -> float:
    """Time where the decay term meets the floor: onset + tau ln(A/sigma).

    Noise-dominated models (floor at or above the level) cross at the
    onset itself. With ``duration`` given, the crossing is clamped to it.
    """
    if model.level <= 0 or model.noise_floor <= 0:
        raise ValueError("detect_noise_floor_onset requires positive level and floor")
    if model.noise_floor >= model.level:
        crossing = model.onset
    else:
        crossing = model.onset + model.tau * math.log(model.level / model.noise_floor)
    if duration is not None:
        crossing = min(crossing, duration)
    return float(crossing)


def synthesize_noise_free_late(model: DecayModel, length: int, seed: int) -> Air:
    """Gaussian noise shaped by the model's decay, with the floor zeroed.

    Deterministic for a fixed seed; zero before the late-field onset.
    """
    sample_rate = int(round(1.0 / model.sample_period))
    t = np.arange(length) * model.sample_period
    envelope = np.zeros(length)
    late = t >= model.onset
    envelope[late] = model.level * np.exp(-(t[late] - model.onset) / model.tau)
    noise = gaussian(generator(seed), length)
    return Air(noise * envelope, sample_rate)


def _crossfade_splice(original: np.ndarray, synth: np.ndarray, at: int, fade: int) -> np.ndarray:
    """Original before ``at``, synth after, power-preserving fade between.

    The fade weights are raised-cosine in power (cos/sin amplitude), so
    two incoherent signals keep constant summed energy through the join.
    """
    out = synth.copy()
    out[:at] = original[:at]
    fade = min(fade, out.size - at, original.size - at)
    if fade > 0:
        x = (np.arange(fade) + 0.5) / fade
        fade_out = np.cos(0.5 * np.pi * x)
        fade_in = np.sin(0.5 * np.pi * x)
        out[at : at + fade] = (
            fade_out * original[at : at + fade] + fade_in * synth[at : at + fade]
        )
    return out


def remove_noise_floor(signal: Air, model: DecayModel, seed: int) -> Air:
    """Replace everything past the floor crossing with a clean late field.

    Returns the input unchanged when the fitted floor never crosses the
    decay within the signal duration. Samples before the crossing are
    bit-identical to the input outside the 10 ms crossfade.
    """
    n = len(signal)
    crossing = detect_noise_floor_onset(model)
    at = int(round(crossing * signal.sample_rate))
    if at >= n:
        return signal
    synth = synthesize_noise_free_late(model, n, seed)
    fade = int(round(CROSSFADE_S * signal.sample_rate))
    return signal.with_samples(_crossfade_splice(signal.samples, synth.samples, at, fade))


def noise_free_extended(signal: Air, model: DecayModel, seed: int, length: int) -> Air:
    """Floor-free version of ``signal`` continued out to ``length`` samples.

    Same splice as :func:`remove_noise_floor`, but the synthesized late
    field also extends past the original end so a slower imposed decay
    has room to be represented.
    """
    n = len(signal)
    length = max(length, n)
    crossing = detect_noise_floor_onset(model)
    fade = int(round(CROSSFADE_S * signal.sample_rate))
    at = int(round(crossing * signal.sample_rate))
    if at >= n:
        if length == n:
            return signal
        at = max(0, n - fade)
    synth = synthesize_noise_free_late(model, length, seed)
    original = np.zeros(length)
    original[:n] = signal.samples
    return signal.with_samples(_crossfade_splice(original, synth.samples, at, fade))
