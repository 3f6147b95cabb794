"""Seeded, splittable Gaussian noise streams.

A stream is identified by a 64-bit seed plus a key tuple, conventionally
``(replicate, component)``. Keys feed ``numpy.random.SeedSequence`` as a
spawn key and drive a counter-based Philox generator, so a given
``(seed, stream)`` always yields the same variates and distinct keys give
statistically independent streams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# component ids used by the simulators when deriving sub-streams
PARTICLES = 0
WISHART = 1
POLYS = 2
GLUED = 3
NON_UNIQUE = 4
PINNED = 5


@dataclass(frozen=True)
class RngSpec:
    seed: int
    stream: tuple[int, ...] = (0, 0)
    zero_noise: bool = False

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if any(int(k) < 0 for k in self.stream):
            raise ValueError("stream keys must be non-negative")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "stream", tuple(int(k) for k in self.stream))

    def child(self, *key: int) -> "RngSpec":
        """Independent sub-stream, e.g. one per sub-system of a construction."""
        return RngSpec(self.seed, self.stream + tuple(key), self.zero_noise)

    def replicate(self, r: int, component: int) -> "RngSpec":
        """Stream ``(r, component)`` for Monte Carlo replicate ``r``."""
        return RngSpec(self.seed, (int(r), int(component)), self.zero_noise)


class GaussianStream:
    """Sequential standard normal variates from one :class:`RngSpec`."""

    def __init__(self, source: RngSpec):
        self.source = source
        if source.zero_noise:
            self._gen = None
        else:
            ss = np.random.SeedSequence(source.seed, spawn_key=source.stream)
            self._gen = np.random.Generator(np.random.Philox(ss))

    def draw(self, n: int) -> np.ndarray:
        if self._gen is None:
            return np.zeros(n)
        return self._gen.standard_normal(n)


def gaussian_stream(source: RngSpec) -> GaussianStream:
    return GaussianStream(source)
