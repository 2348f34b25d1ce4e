"""Named, independent random streams derived from one run seed."""

from __future__ import annotations

import zlib

import numpy as np

__all__ = ["stream"]


def stream(seed: int, label: str, *extra: int) -> np.random.Generator:
    """Generator for consumer ``label``; adding consumers never perturbs others."""
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    entropy = [seed & 0xFFFFFFFF, seed >> 32, zlib.crc32(label.encode()), *extra]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
