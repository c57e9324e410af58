"""
Per-task seed derivation

Every random draw in a run descends from the command's single --seed:

    derive_seed(seed, "corpus", 17)

feeds (seed, crc32("corpus"), 17) to numpy's SeedSequence and returns the
first 32-bit word of its state. String keys are hashed with CRC-32 so the
derivation is stable across processes and Python versions.
"""

import zlib
from typing import Union

import numpy as np

SeedKey = Union[int, str]


def _key_to_int(key: SeedKey) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode('utf-8'))
    if key < 0:
        raise ValueError(f"seed keys must be non-negative, got {key}")
    return int(key)


def derive_seed(base: int, *keys: SeedKey) -> int:
    """Deterministic child seed of `base` for the task named by `keys`"""
    if base < 0:
        raise ValueError(f"base seed must be non-negative, got {base}")
    sequence = np.random.SeedSequence(entropy=int(base), spawn_key=tuple(_key_to_int(k) for k in keys))
    return int(sequence.generate_state(1, dtype=np.uint32)[0])
