"""Deterministic random-stream derivation.

Every stochastic step in the toolkit keys its randomness off a master seed
plus structural coordinates (iteration, family, tree index, ...) so results
are independent of execution order and parallelism. Strings are hashed with
blake2b, never the process-salted builtin hash.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _words(keys: tuple) -> list[int]:
    """Flatten mixed int/str keys into 32-bit entropy words."""
    words: list[int] = []
    for key in keys:
        if isinstance(key, (bool, np.bool_)):
            words.append(int(key))
        elif isinstance(key, (int, np.integer)):
            value = int(key) & _MASK64
            words.append(value & 0xFFFFFFFF)
            words.append(value >> 32)
        elif isinstance(key, str):
            digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
            value = int.from_bytes(digest, "little")
            words.append(value & 0xFFFFFFFF)
            words.append(value >> 32)
        else:
            raise TypeError(f"unsupported seed key type: {type(key).__name__}")
    return words


def rng_from(*keys: int | str) -> np.random.Generator:
    """A numpy Generator deterministically derived from the key tuple."""
    if not keys:
        raise ValueError("at least one seed key required")
    return np.random.default_rng(np.random.SeedSequence(_words(tuple(keys))))


def u64_from(*keys: int | str) -> int:
    """A single 64-bit state word derived from the key tuple.

    Feeds the numba kernels, which run their own splitmix64 stream.
    """
    if not keys:
        raise ValueError("at least one seed key required")
    digest = hashlib.blake2b(digest_size=8)
    for word in _words(tuple(keys)):
        digest.update(int(word).to_bytes(4, "little"))
    value = int.from_bytes(digest.digest(), "little")
    return value if value != 0 else 0x9E3779B97F4A7C15


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 stream once: returns (new_state, output).

    Mirrors the in-kernel implementation bit for bit; kept in Python so tests
    can cross-check kernel streams.
    """
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    z = z ^ (z >> 31)
    return state, z
