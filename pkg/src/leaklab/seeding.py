"""Deterministic seed splitting for the layered traffic pipeline.

Every random draw in a run comes from a counter-based Philox stream keyed by
(seed XOR per-layer salt, stream index).  Distinct keys give statistically
independent streams, so each layer can be re-run in isolation and trials can
be fanned out to workers without replaying the whole pipeline or sharing
generator state.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

LAYER_SALTS = {
    "app": 0x9E3779B97F4A7C15,
    "protocol": 0xC2B2AE3D27D4EB4F,
    "encrypt": 0x165667B19E3779F9,
    "network": 0x27D4EB2F165667C5,
    "observe": 0x85EBCA77C2B2AE63,
    "cover": 0xFF51AFD7ED558CCD,
}


def layer_rng(seed: int, layer: str, stream: int = 0) -> np.random.Generator:
    """Independent generator for one layer of one run.

    ``stream`` separates parallel uses of the same layer within a run
    (e.g. one stream per semantic label at the application layer).
    """
    salt = LAYER_SALTS[layer]
    # The key must be a uint64 array: plain int tuples round-trip through
    # float64 inside numpy and silently lose the low key bits.
    key = np.array(
        [(int(seed) ^ salt) & _MASK64, int(stream) & _MASK64], dtype=np.uint64
    )
    return np.random.Generator(np.random.Philox(key=key))


def trial_seed(master_seed: int, trial: int) -> int:
    """Per-trial seed: master seed XOR trial index.

    Distinct trials map to distinct Philox keys in every layer, which is all
    the counter-based generator needs for independent streams.
    """
    return (int(master_seed) ^ int(trial)) & _MASK64
