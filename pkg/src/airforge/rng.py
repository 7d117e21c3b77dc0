"""Seeded, portable random number generation.

All stochastic steps in the toolkit draw from PCG64 streams keyed by an
integer seed path, with Gaussians produced by a Box-Muller transform of
the raw uniforms. Both pieces are bit-stable across platforms, which is
what makes regenerated dataset rows byte-identical.
"""
from __future__ import annotations

import numpy as np

# Stream tags keep derived seeds for unrelated purposes disjoint.
TAG_AIR = 1
TAG_SPEECH = 2
TAG_NOISE = 3
TAG_MIX = 4
TAG_BAND = 5
TAG_PARTITION = 6


def generator(seed: int, *path: int) -> np.random.Generator:
    """Return a PCG64 generator for ``seed`` refined by an integer path.

    The same (seed, path) always yields the same stream; distinct paths
    from one master seed yield statistically independent streams.
    """
    seq = np.random.SeedSequence([int(seed), *[int(p) for p in path]])
    return np.random.Generator(np.random.PCG64(seq))


def gaussian(rng: np.random.Generator, size: int) -> np.ndarray:
    """Standard normal samples via Box-Muller on ``rng``'s uniforms.

    Avoids the generator's own ziggurat sampler so the mapping from
    uniform stream to Gaussian stream is fixed arithmetic.
    """
    if size == 0:
        return np.zeros(0)
    pairs = (size + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # in (0, 1], keeps log finite
    u2 = rng.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:size]
