"""Deterministic seeding and measurement sampling.

Every random quantity in the package derives from a single 64-bit base seed:
sweep cells get per-cell seeds through a splitmix-style finalizer, and
homodyne outcomes are drawn from a counter-based Philox stream keyed by
(seed, round, pair, quadrature). Results are therefore reproducible and
independent of evaluation order and of the level of parallelism.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

_QUAD_CODE = {"x": 0, "p": 1}


def splitmix64(value: int) -> int:
    """64-bit splitmix finalizer (Steele et al.), the mixing step of SplitMix64."""
    z = (value + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, index: int) -> int:
    """Combine a base seed with a cell/stream index into an independent seed."""
    return splitmix64((int(base_seed) + (int(index) + 1) * _GOLDEN) & _MASK64)


class MeasurementStream:
    """Counter-based Gaussian outcome stream.

    Each draw is keyed by (round, pair, quadrature), so outcomes do not depend
    on the order in which they are requested.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64

    def normal(self, round_index: int, pair_index: int, quadrature: str,
               mean: float, std: float) -> float:
        counter = [int(round_index), int(pair_index), _QUAD_CODE[quadrature], 0]
        gen = np.random.Generator(np.random.Philox(key=self.seed, counter=counter))
        return float(mean + std * gen.standard_normal())
