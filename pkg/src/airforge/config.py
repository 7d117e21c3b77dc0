"""Dataset configuration: schema validation and defaults."""
from __future__ import annotations

import json
from importlib import resources

import jsonschema

from .errors import DataError

_DEFAULTS = {
    "chunk_seconds": 8.0,
    "segment_seconds": 4.0,
    "target_loudness_lufs": -23.0,
    "workers": 1,
}


def schema() -> dict:
    text = resources.files("airforge").joinpath("schemas/dataset_config.schema.json").read_text()
    return json.loads(text)


def validate_config(config: dict) -> dict:
    """Validate against the published schema and fill defaults in place."""
    try:
        jsonschema.validate(config, schema())
    except jsonschema.ValidationError as exc:
        raise DataError(f"invalid dataset config: {exc.message}") from exc
    for key, value in _DEFAULTS.items():
        config.setdefault(key, value)
    total = sum(config["partitions"].values())
    if abs(total - 1.0) > 1e-6:
        raise DataError(f"partition fractions must sum to 1, got {total}")
    for key in ("t60_range", "drr_range", "snr_range"):
        lo, hi = config[key]
        if lo > hi:
            raise DataError(f"{key} is reversed: {config[key]}")
    return config


def load_config(path) -> dict:
    with open(path) as fh:
        config = json.load(fh)
    return validate_config(config)
