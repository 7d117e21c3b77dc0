"""Reverberant-speech dataset synthesis with ground-truth labels.

Speech is chunked and loudness-normalized, seed AIRs are expanded into a
balanced pool by uniform T60/DRR retargeting, and each dataset row is a
4 s gated segment of speech convolved with one augmented AIR plus
SNR-scaled noise. Every random draw is keyed by the master seed and row
index, and every referenced signal is stored, so any row regenerates
bit-exactly from its recipe. Labels are the re-measured (calibrated)
T60/DRR of the stored AIR, never the requested targets.
"""
from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve

from .air import Air, split_early_late, measure_drr, find_direct_path, DEFAULT_TOLERANCE_S
from .augment import AugmentSpec, augment
from .decay import compute_envelope, fit_decay_model, measure_t60
from .errors import AirForgeError, DataError, SilenceError
from .levels import active_speech_level, normalize_loudness, rms_level
from .rng import TAG_AIR, TAG_MIX, TAG_NOISE, TAG_PARTITION, TAG_SPEECH, generator
from .synth import speech_surrogate, synthetic_air, white_noise
from .wavio import read_wav, write_wav

log = logging.getLogger(__name__)

SNR_MIN_DB, SNR_MAX_DB = -5.0, 20.0
SEGMENT_GATE_DB = 20.0
_SEGMENT_TRIES = 100
PARTITIONS = ("train", "val", "test")


@dataclass(frozen=True)
class MixRecipe:
    """Everything needed to regenerate one dataset row bit-exactly."""

    speech_ref: str
    air_ref: str
    noise_ref: str
    snr: float
    noise_shift: int
    segment_start: int
    seed: int

    def __post_init__(self):
        if not SNR_MIN_DB <= self.snr <= SNR_MAX_DB:
            raise ValueError(f"snr {self.snr} outside [{SNR_MIN_DB}, {SNR_MAX_DB}] dB")

    def to_json_dict(self) -> dict:
        return {
            "speech_ref": self.speech_ref,
            "air_ref": self.air_ref,
            "noise_ref": self.noise_ref,
            "snr": self.snr,
            "noise_shift": self.noise_shift,
            "segment_start": self.segment_start,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, rec: dict) -> "MixRecipe":
        return cls(**rec)


@dataclass(frozen=True)
class ManifestRow:
    file: str
    partition: str
    label_t60: float
    label_drr: float
    recipe: MixRecipe

    def to_json(self) -> str:
        return json.dumps(
            {
                "file": self.file,
                "partition": self.partition,
                "label_t60": self.label_t60,
                "label_drr": self.label_drr,
                "recipe": self.recipe.to_json_dict(),
            }
        )

    @classmethod
    def from_json(cls, line: str) -> "ManifestRow":
        rec = json.loads(line)
        return cls(
            file=rec["file"],
            partition=rec["partition"],
            label_t60=rec["label_t60"],
            label_drr=rec["label_drr"],
            recipe=MixRecipe.from_json_dict(rec["recipe"]),
        )


@dataclass(frozen=True)
class Manifest:
    rows: tuple
    header: dict

    def partition(self, name: str) -> list:
        return [r for r in self.rows if r.partition == name]


@dataclass(frozen=True)
class Calibration:
    """Affine map from raw estimates to corpus-matched labels."""

    slope: float = 1.0
    intercept: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.slope) or self.slope == 0.0:
            raise ValueError("calibration slope must be finite and nonzero")

    def apply(self, value):
        return self.slope * np.asarray(value) + self.intercept

    def to_json_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept}


def fit_calibration(estimates, labels) -> Calibration:
    """Least-squares slope/intercept mapping estimates onto labels.

    The calibrated estimates have zero mean residual by construction.
    """
    e = np.asarray(estimates, dtype=np.float64)
    l = np.asarray(labels, dtype=np.float64)
    if e.size != l.size or e.size < 2:
        raise DataError("need at least two paired points")
    if np.ptp(e) == 0.0:
        raise DataError("estimates are constant; calibration line is undefined")
    slope, intercept = np.polyfit(e, l, 1)
    return Calibration(slope=float(slope), intercept=float(intercept))


# --------------------------------------------------------------------------
# Segmentation


@dataclass(frozen=True)
class Segment:
    """One stored chunk of source material."""

    name: str
    speaker: str
    air: Air


def _chunk_air(air: Air, chunk: float) -> list:
    n = int(round(chunk * air.sample_rate))
    count = len(air) // n
    return [air.with_samples(air.samples[k * n : (k + 1) * n]) for k in range(count)]


def segment_corpus(
    files,
    chunk: float,
    target_loudness: float | None,
    sample_rate: int | None = None,
) -> list:
    """Split files into non-overlapping chunks, optionally normalized.

    Remainders shorter than ``chunk`` are dropped; unreadable files,
    rate mismatches, and silent chunks are skipped with a warning.
    Speaker identity is the file stem up to the first underscore.
    """
    if chunk <= 0:
        raise ValueError("chunk must be positive")
    segments = []
    for path in files:
        path = Path(path)
        try:
            air = read_wav(path)
        except (DataError, FileNotFoundError, OSError) as exc:
            log.warning("skipping unreadable file %s: %s", path, exc)
            continue
        if sample_rate is not None and air.sample_rate != sample_rate:
            log.warning(
                "skipping %s: sample rate %d != pipeline rate %d",
                path, air.sample_rate, sample_rate,
            )
            continue
        speaker = path.stem.split("_")[0]
        for k, piece in enumerate(_chunk_air(air, chunk)):
            try:
                if target_loudness is not None:
                    piece = normalize_loudness(piece, target_loudness)
            except (SilenceError, DataError) as exc:
                log.warning("skipping silent chunk %s[%d]: %s", path, k, exc)
                continue
            segments.append(Segment(name=f"{path.stem}_c{k}", speaker=speaker, air=piece))
    return segments


# --------------------------------------------------------------------------
# AIR pool generation


@dataclass(frozen=True)
class LabeledAir:
    name: str
    air: Air  # float32-quantized, as stored
    label_t60: float
    label_drr: float
    requested_t60: float
    requested_drr: float
    clipped: bool
    seed: int


def _as_stored(air: Air) -> Air:
    """Round to the 32-bit float actually written to disk."""
    return air.with_samples(air.samples.astype(np.float32).astype(np.float64))


def measure_air_labels(air: Air) -> tuple:
    """Raw (T60, DRR) of an AIR with the toolkit's own estimators."""
    onset = find_direct_path(air) / air.sample_rate + DEFAULT_TOLERANCE_S
    t60 = measure_t60(fit_decay_model(compute_envelope(air), 1.0 / air.sample_rate, onset=onset))
    drr = measure_drr(split_early_late(air, DEFAULT_TOLERANCE_S))
    return t60, drr


def generate_air_set(
    seed_airs,
    count_per_air: int,
    t60_range,
    drr_range,
    seed: int,
    calibration_t60: Calibration = Calibration(),
    calibration_drr: Calibration = Calibration(),
    name_prefix: str = "air",
) -> list:
    """Expand seed AIRs with uniformly drawn T60/DRR targets.

    Labels are the calibrated re-measured values of the stored (32-bit)
    AIR. A failed augmentation resamples its targets up to 10 times,
    then the draw is skipped with a warning.
    """
    out = []
    for i, base in enumerate(seed_airs):
        for j in range(count_per_air):
            rng = generator(seed, TAG_AIR, i, j)
            result = None
            for _ in range(10):
                t60_target = float(rng.uniform(*t60_range))
                drr_target = float(rng.uniform(*drr_range))
                aug_seed = int(rng.integers(0, 2**63 - 1))
                try:
                    result = augment(
                        base,
                        AugmentSpec(target_t60=t60_target, target_drr=drr_target, seed=aug_seed),
                    )
                    break
                except AirForgeError as exc:
                    log.warning("augmentation retry (air %d draw %d): %s", i, j, exc)
            if result is None:
                log.warning("skipping air %d draw %d after 10 failed attempts", i, j)
                continue
            aug, report = result
            stored = _as_stored(aug)
            t60_raw, drr_raw = measure_air_labels(stored)
            out.append(
                LabeledAir(
                    name=f"{name_prefix}_{i:03d}_{j:04d}",
                    air=stored,
                    label_t60=float(calibration_t60.apply(t60_raw)),
                    label_drr=float(calibration_drr.apply(drr_raw)),
                    requested_t60=t60_target,
                    requested_drr=drr_target,
                    clipped=report.clipped,
                    seed=aug_seed,
                )
            )
    return out


# --------------------------------------------------------------------------
# Mixing


def select_segment(mixture: Air, length: float, seed: int) -> int:
    """Uniformly random start whose segment RMS clears the gate.

    Accepts a start when the segment RMS is within 20 dB of the
    full-signal RMS; resamples up to 100 times, then returns the best
    start seen.
    """
    n_seg = int(round(length * mixture.sample_rate))
    if len(mixture) < n_seg:
        raise DataError("mixture shorter than the requested segment")
    full = rms_level(mixture)
    threshold = full.value - SEGMENT_GATE_DB
    rng = generator(seed)
    best_start, best_rms = 0, -np.inf
    for _ in range(_SEGMENT_TRIES):
        start = int(rng.integers(0, len(mixture) - n_seg + 1))
        seg_rms = rms_level(mixture.with_samples(mixture.samples[start : start + n_seg]))
        if seg_rms.value >= threshold:
            return start
        if seg_rms.value > best_rms:
            best_start, best_rms = start, seg_rms.value
    return best_start


def _mix_full(speech: Air, air: Air, noise: Air, snr: float, noise_shift: int) -> Air:
    if not speech.sample_rate == air.sample_rate == noise.sample_rate:
        raise DataError("speech, AIR, and noise must share the pipeline rate")
    for name, sig in (("speech", speech), ("air", air), ("noise", noise)):
        if not np.any(sig.samples):
            raise SilenceError(f"silent {name} input")
    reverberant = fftconvolve(speech.samples, air.samples, mode="full")
    rev_air = speech.with_samples(reverberant)
    shifted = np.roll(noise.samples, int(noise_shift))
    tiled = np.resize(shifted, reverberant.size)
    asl = active_speech_level(rev_air).value
    noise_rms = rms_level(noise.with_samples(tiled)).value
    gain = 10.0 ** ((asl - noise_rms - snr) / 20.0)
    return speech.with_samples(reverberant + gain * tiled)


def mix_sample(
    recipe: MixRecipe, speech: Air, air: Air, noise: Air, segment_seconds: float = 4.0
) -> Air:
    """Convolve, add SNR-scaled shifted noise, extract the recipe's window.

    The noise gain makes (active level of reverberant speech) minus
    (RMS of scaled noise) equal the recipe SNR.
    """
    mixture = _mix_full(speech, air, noise, recipe.snr, recipe.noise_shift)
    n_seg = int(round(segment_seconds * mixture.sample_rate))
    start = int(recipe.segment_start)
    if start < 0 or start + n_seg > len(mixture):
        raise DataError("segment window falls outside the mixture")
    return mixture.with_samples(mixture.samples[start : start + n_seg])


# --------------------------------------------------------------------------
# Dataset build


def draw_mix_params(master: int, row_index: int, n_airs: int, n_noise: int,
                    snr_range) -> tuple:
    """Per-row draws, keyed by (master seed, row index).

    Returns (air index, noise index, snr, circular-shift fraction of the
    noise length, segment-selection seed); the SNR is uniform over
    ``snr_range`` and the shift uniform over the noise length.
    """
    rng = generator(master, TAG_MIX, row_index)
    air_i = int(rng.integers(0, n_airs))
    noise_i = int(rng.integers(0, n_noise))
    snr = float(rng.uniform(*snr_range))
    shift_frac = float(rng.random())
    seg_seed = int(rng.integers(0, 2**62))
    return air_i, noise_i, snr, shift_frac, seg_seed


def _partition_names(fractions: dict) -> list:
    names = [p for p in PARTITIONS if fractions.get(p, 0.0) > 0.0]
    if not names:
        raise DataError("no partition has a positive fraction")
    return names


def _split_by_speaker(segments, fractions: dict, seed: int) -> dict:
    """Partition segments with each speaker in exactly one partition."""
    names = _partition_names(fractions)
    speakers = sorted({s.speaker for s in segments})
    if len(speakers) < len(names):
        raise DataError(
            f"insufficient speakers: {len(speakers)} for {len(names)} partitions"
        )
    rng = generator(seed, TAG_PARTITION, 1)
    order = list(rng.permutation(len(speakers)))
    counts = _allocate(len(speakers), [fractions[n] for n in names])
    assignment = {}
    pos = 0
    for name, count in zip(names, counts):
        for k in order[pos : pos + count]:
            assignment[speakers[k]] = name
        pos += count
    out = {n: [] for n in names}
    for seg in segments:
        out[assignment[seg.speaker]].append(seg)
    return out


def _split_items(items, fractions: dict, seed: int, tag: int) -> dict:
    names = _partition_names(fractions)
    if len(items) < len(names):
        raise DataError(f"insufficient items: {len(items)} for {len(names)} partitions")
    rng = generator(seed, TAG_PARTITION, tag)
    order = list(rng.permutation(len(items)))
    counts = _allocate(len(items), [fractions[n] for n in names])
    out = {}
    pos = 0
    for name, count in zip(names, counts):
        out[name] = [items[k] for k in order[pos : pos + count]]
        pos += count
    return out


def _allocate(total: int, fractions) -> list:
    """Largest-remainder allocation with at least one item per part."""
    raw = [f * total for f in fractions]
    counts = [max(1, int(f)) for f in raw]
    while sum(counts) > total:
        k = int(np.argmax([c - r for c, r in zip(counts, raw)]))
        if counts[k] <= 1:
            break
        counts[k] -= 1
    while sum(counts) < total:
        k = int(np.argmax([r - c for c, r in zip(counts, raw)]))
        counts[k] += 1
    return counts


def _synthetic_speech_files(cfg: dict, sample_rate: int, master_seed: int):
    airs = []
    for s in range(cfg["speakers"]):
        for f in range(cfg["files_per_speaker"]):
            air = speech_surrogate(
                cfg["file_seconds"], sample_rate,
                seed=int(generator(master_seed, TAG_SPEECH, s, f).integers(0, 2**62)),
            )
            airs.append((f"sp{s:02d}_f{f}", f"sp{s:02d}", air))
    return airs


def _segment_sources(named_airs, chunk: float, target_loudness: float | None):
    segments = []
    for name, speaker, air in named_airs:
        for k, piece in enumerate(_chunk_air(air, chunk)):
            try:
                if target_loudness is not None:
                    piece = normalize_loudness(piece, target_loudness)
            except (SilenceError, DataError) as exc:
                log.warning("skipping silent chunk %s[%d]: %s", name, k, exc)
                continue
            segments.append(Segment(name=f"{name}_c{k}", speaker=speaker, air=piece))
    return segments


def build_dataset(config: dict, out_dir) -> Manifest:
    """Run the full synthesis pipeline and write mixtures + manifest.

    The result is a pure function of (source files, config, master
    seed): rerunning with the same inputs reproduces every byte.
    """
    from .config import validate_config  # local import to avoid a cycle

    validate_config(config)
    out_dir = Path(out_dir)
    fs = config["sample_rate"]
    chunk = config["chunk_seconds"]
    seg_seconds = config["segment_seconds"]
    master = config["master_seed"]
    fractions = config["partitions"]
    cal_t60 = Calibration(**config.get("calibration", {}).get("t60", {}))
    cal_drr = Calibration(**config.get("calibration", {}).get("drr", {}))

    # Source material: speech segments.
    speech_cfg = config["speech"]
    if speech_cfg["mode"] == "synthetic":
        named = _synthetic_speech_files(speech_cfg, fs, master)
        segments = _segment_sources(named, chunk, config["target_loudness_lufs"])
    else:
        files = sorted(Path(speech_cfg["path"]).glob("*.wav"))
        segments = segment_corpus(files, chunk, config["target_loudness_lufs"], fs)
    speech_parts = _split_by_speaker(segments, fractions, master)

    # Noise chunks.
    noise_cfg = config["noise"]
    if noise_cfg["mode"] == "synthetic":
        named = [
            (f"noise{k:02d}", f"noise{k:02d}",
             white_noise(noise_cfg["file_seconds"], fs,
                         seed=int(generator(master, TAG_NOISE, k).integers(0, 2**62))))
            for k in range(noise_cfg["files"])
        ]
        noise_chunks = _segment_sources(named, chunk, None)
    else:
        files = sorted(Path(noise_cfg["path"]).glob("*.wav"))
        noise_chunks = segment_corpus(files, chunk, None, fs)
    noise_parts = _split_items(noise_chunks, fractions, master, 2)

    # Seed AIRs, partitioned before augmentation so pools stay disjoint.
    air_cfg = config["airs"]
    if air_cfg["mode"] == "synthetic":
        seed_airs = [
            synthetic_air(
                sample_rate=fs,
                duration=max(0.6, 1.2 * air_cfg["t60_range"][1]),
                t60=float(generator(master, TAG_AIR, 900 + k).uniform(*air_cfg["t60_range"])),
                noise_floor_db=-60.0,
                seed=int(generator(master, TAG_AIR, 100 + k).integers(0, 2**62)),
            )
            for k in range(air_cfg["count"])
        ]
    else:
        seed_airs = [read_wav(p) for p in sorted(Path(air_cfg["path"]).glob("*.wav"))]
    air_parts = _split_items(seed_airs, fractions, master, 3)

    pools = {}
    for part, airs in air_parts.items():
        pools[part] = generate_air_set(
            airs,
            config["augmentations_per_air"],
            config["t60_range"],
            config["drr_range"],
            seed=generator(master, TAG_AIR, 4).integers(0, 2**62),
            calibration_t60=cal_t60,
            calibration_drr=cal_drr,
            name_prefix=f"air_{part}",
        )
        if not pools[part]:
            raise DataError(f"no augmented AIRs survived for partition {part!r}")

    # Persist referenced material.
    for part, segs in speech_parts.items():
        for seg in segs:
            write_wav(out_dir / "speech" / f"{seg.name}.wav", seg.air)
    for part, chunks in noise_parts.items():
        for seg in chunks:
            write_wav(out_dir / "noise" / f"{seg.name}.wav", seg.air)
    air_index = []
    for part, pool in pools.items():
        for rec in pool:
            write_wav(out_dir / "airs" / f"{rec.name}.wav", rec.air)
            air_index.append(
                {
                    "file": f"airs/{rec.name}.wav",
                    "partition": part,
                    "label_t60": rec.label_t60,
                    "label_drr": rec.label_drr,
                    "requested_t60": rec.requested_t60,
                    "requested_drr": rec.requested_drr,
                    "clipped": rec.clipped,
                    "seed": rec.seed,
                }
            )

    # Row plan, then (optionally parallel) mixing.
    snr_lo, snr_hi = config["snr_range"]
    mixes = config["mixes_per_segment"]
    plan = []
    row_index = 0
    for part in sorted(speech_parts, key=PARTITIONS.index):
        for seg in speech_parts[part]:
            for _ in range(mixes):
                plan.append((row_index, part, seg))
                row_index += 1

    def make_row(entry):
        idx, part, seg = entry
        pool = pools[part]
        noise_pool = noise_parts[part]
        air_i, noise_i, snr, shift_frac, seg_seed = draw_mix_params(
            master, idx, len(pool), len(noise_pool), (snr_lo, snr_hi)
        )
        air_rec = pool[air_i]
        noise_seg = noise_pool[noise_i]
        shift = int(shift_frac * len(noise_seg.air))

        speech_stored = _as_stored(seg.air)
        noise_stored = _as_stored(noise_seg.air)
        full = _mix_full(speech_stored, air_rec.air, noise_stored, snr, shift)
        start = select_segment(full, seg_seconds, seg_seed)
        recipe = MixRecipe(
            speech_ref=f"speech/{seg.name}.wav",
            air_ref=f"airs/{air_rec.name}.wav",
            noise_ref=f"noise/{noise_seg.name}.wav",
            snr=snr,
            noise_shift=shift,
            segment_start=start,
            seed=seg_seed,
        )
        mixture = mix_sample(recipe, speech_stored, air_rec.air, noise_stored, seg_seconds)
        name = f"mixtures/row_{idx:06d}.wav"
        write_wav(out_dir / name, mixture)
        return ManifestRow(
            file=name,
            partition=part,
            label_t60=air_rec.label_t60,
            label_drr=air_rec.label_drr,
            recipe=recipe,
        )

    workers = max(1, int(config.get("workers", 1)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool_exec:
            rows = list(pool_exec.map(make_row, plan))
    else:
        rows = [make_row(entry) for entry in plan]

    header = {
        "config": config,
        "calibration": {"t60": cal_t60.to_json_dict(), "drr": cal_drr.to_json_dict()},
        "row_count": len(rows),
    }
    with open(out_dir / "airs_index.jsonl", "w") as fh:
        for rec in air_index:
            fh.write(json.dumps(rec) + "\n")
    with open(out_dir / "header.json", "w") as fh:
        json.dump(header, fh, indent=2)
    with open(out_dir / "manifest.jsonl", "w") as fh:
        for row in rows:
            fh.write(row.to_json() + "\n")
    return Manifest(rows=tuple(rows), header=header)


def load_manifest(out_dir) -> Manifest:
    out_dir = Path(out_dir)
    with open(out_dir / "header.json") as fh:
        header = json.load(fh)
    rows = []
    with open(out_dir / "manifest.jsonl") as fh:
        for line in fh:
            if line.strip():
                rows.append(ManifestRow.from_json(line))
    return Manifest(rows=tuple(rows), header=header)


def regenerate_row(out_dir, row: ManifestRow, segment_seconds: float = 4.0) -> Air:
    """Rebuild a row's mixture from its recipe and the stored sources."""
    out_dir = Path(out_dir)
    speech = read_wav(out_dir / row.recipe.speech_ref)
    air = read_wav(out_dir / row.recipe.air_ref)
    noise = read_wav(out_dir / row.recipe.noise_ref)
    return mix_sample(row.recipe, speech, air, noise, segment_seconds)
