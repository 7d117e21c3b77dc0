"""airforge: parametric T60/DRR retargeting of acoustic impulse responses
and reverberant-speech dataset synthesis with ground-truth labels."""

from .air import (
    Air,
    EarlyLateSplit,
    find_direct_path,
    measure_drr,
    split_early_late,
)
from .augment import (
    AugmentReport,
    AugmentSpec,
    augment,
    augment_drr,
    augment_t60_fullband,
    augment_t60_subband,
    solve_drr_gain,
)
from .dataset import (
    Calibration,
    Manifest,
    ManifestRow,
    MixRecipe,
    build_dataset,
    fit_calibration,
    generate_air_set,
    load_manifest,
    mix_sample,
    regenerate_row,
    segment_corpus,
    select_segment,
)
from .decay import (
    DecayModel,
    EnergyEnvelope,
    compute_envelope,
    detect_noise_floor_onset,
    fit_decay_model,
    measure_t60,
    remove_noise_floor,
    synthesize_noise_free_late,
)
from .evaluate import EvalStats, evaluate, report
from .filterbank import FilterbankSpec, SubbandSet, analyze, design_filterbank, synthesize
from .levels import (
    LevelReport,
    active_speech_level,
    integrated_loudness,
    lufs_level,
    normalize_loudness,
    rms_level,
)
from .wavio import read_wav, write_wav

__version__ = "0.1.0"

__all__ = [
    "Air",
    "AugmentReport",
    "AugmentSpec",
    "Calibration",
    "DecayModel",
    "EarlyLateSplit",
    "EnergyEnvelope",
    "EvalStats",
    "FilterbankSpec",
    "LevelReport",
    "Manifest",
    "ManifestRow",
    "MixRecipe",
    "SubbandSet",
    "analyze",
    "augment",
    "augment_drr",
    "augment_t60_fullband",
    "augment_t60_subband",
    "active_speech_level",
    "build_dataset",
    "compute_envelope",
    "design_filterbank",
    "detect_noise_floor_onset",
    "evaluate",
    "find_direct_path",
    "fit_calibration",
    "fit_decay_model",
    "generate_air_set",
    "integrated_loudness",
    "load_manifest",
    "lufs_level",
    "measure_drr",
    "measure_t60",
    "mix_sample",
    "normalize_loudness",
    "read_wav",
    "regenerate_row",
    "remove_noise_floor",
    "report",
    "rms_level",
    "segment_corpus",
    "select_segment",
    "solve_drr_gain",
    "split_early_late",
    "synthesize",
    "synthesize_noise_free_late",
    "write_wav",
]
