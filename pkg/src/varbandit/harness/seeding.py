"""Deterministic seed derivation.

Seeds are mixed with the SplitMix64 finaliser (constants 0x9E3779B97F4A7C15,
0xBF58476D1CE4E5B9, 0x94D049BB133111EB):

    derive_seed(base, rep, stream) = mix(mix(mix(base) ^ rep) ^ stream)

Stream 0 is reserved for the environment, so every policy in a replication
replays the same reward tape; policy ``j`` (0-based position in the config)
uses stream ``j + 1`` for its own randomness.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
ENV_STREAM = 0


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(base_seed: int, replication_id: int, stream: int) -> int:
    h = splitmix64(base_seed & MASK64)
    h = splitmix64(h ^ (replication_id & MASK64))
    return splitmix64(h ^ (stream & MASK64))


def env_seed(base_seed: int, replication_id: int) -> int:
    return derive_seed(base_seed, replication_id, ENV_STREAM)


def policy_seed(base_seed: int, replication_id: int, policy_index: int) -> int:
    return derive_seed(base_seed, replication_id, policy_index + 1)


def generator(seed: int, *extra: int) -> np.random.Generator:
    return np.random.default_rng([seed, *extra] if extra else seed)
