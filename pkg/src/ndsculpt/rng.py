"""Deterministic randomness.

A single seeded, counter-based source backs every stochastic operation.
Each substream is an independent Philox stream keyed by (seed, counter),
so a session replayed with the same seed and the same command sequence
draws bit-identical values on any platform.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngHandle:
    seed: int
    counter: int = 0

    def stream(self) -> np.random.Generator:
        """Generator for the current substream; does not advance the handle."""
        key = np.array([self.seed & _MASK64, self.counter & _MASK64],
                       dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def advance(self) -> "RngHandle":
        """Handle for the next substream."""
        return RngHandle(self.seed, self.counter + 1)
