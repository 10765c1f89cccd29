"""
Seedable, splittable random streams.

Every consumer draws from its own substream derived from (seed, stream, index)
through numpy's SeedSequence spawn keys, so adding additional agents never
shifts the draws of normal agents.
"""

import numpy as np

STREAM_NA_PARAMS = 0
STREAM_NA_STEPS = 1
STREAM_SCHEDULE = 2


def substream(seed: int, stream: int, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(stream, index)))


class BufferedDraws:
    """Per-agent noise source: standard normals and U(0,1) drawn in blocks."""

    def __init__(self, generator: np.random.Generator, block: int = 256):
        self._gen = generator
        self._block = block
        self._normals: list = []
        self._uniforms: list = []
        self._ni = 0
        self._ui = 0

    def normal(self) -> float:
        if self._ni == len(self._normals):
            self._normals = self._gen.standard_normal(self._block).tolist()
            self._ni = 0
        v = self._normals[self._ni]
        self._ni += 1
        return v

    def uniform(self) -> float:
        if self._ui == len(self._uniforms):
            self._uniforms = self._gen.random(self._block).tolist()
            self._ui = 0
        v = self._uniforms[self._ui]
        self._ui += 1
        return v
