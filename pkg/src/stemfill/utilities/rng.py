"""Seeded random streams.

Every generator is a Philox counter-based bit generator keyed by
``(seed, stream)``, so the mask, noise, spectra and abundance draws come from
independent substreams and adding draws to one never shifts the others.
"""

import hashlib

import numpy as np

STREAMS = ("spectra", "abundances", "noise", "mask")


def stream_key(seed: int, stream: str) -> int:
    if stream not in STREAMS:
        raise ValueError(f"Unknown random stream: {stream}")
    if seed < 0:
        raise ValueError(f"Seed must be non-negative, got {seed}")
    digest = hashlib.sha256(f"stemfill:{stream}".encode()).digest()
    salt = int.from_bytes(digest[:8], "little")
    # Philox keys are 128-bit: low word is the seed, high word the stream salt.
    return (salt << 64) | (seed & 0xFFFFFFFFFFFFFFFF)


def generator(seed: int, stream: str) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=stream_key(seed, stream)))
