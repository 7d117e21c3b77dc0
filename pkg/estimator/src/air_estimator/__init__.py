"""Blind T60/DRR regression from reverberant speech."""

from .data import Example, load_features, load_manifest, read_wav
from .features import FeatureError, featurize, mel_filterbank
from .inference import infer, load_checkpoint, tile_to_window, window_starts
from .model import (
    ConstructionError,
    ModelSpec,
    BlindRegressor,
    build_model,
    parameter_counts,
)
from .training import TrainResult, train

__version__ = "0.1.0"
