"""Seed handling shared by the samplers and the experiment runner.

All randomness comes from numpy's PCG64 bit generator. Replicate seeds are
derived from a master seed with a splitmix64-style finalizer so that every
replicate can be generated independently, in any order, by any worker.
"""

from __future__ import annotations

import secrets

import numpy as np

GENERATOR_NAME = "numpy.PCG64"
SEED_MIX_NAME = "splitmix64(master + (replicate+1)*0x9E3779B97F4A7C15 + grid*0xD1B54A32D192ED03)"

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_GRID_STRIDE = 0xD1B54A32D192ED03


def _finalize(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def mix_seed(master: int, replicate: int, grid: int = 0) -> int:
    """64-bit seed for replicate ``replicate`` of grid point ``grid``."""
    z = (int(master) + (int(replicate) + 1) * _GOLDEN + int(grid) * _GRID_STRIDE) & _MASK
    return _finalize(z)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK))


def entropy_seed() -> int:
    return secrets.randbits(64)
