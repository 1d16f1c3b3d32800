"""Quasi-static Rayleigh channel sampling with reproducible substreams.

Each trial draws the two relay-side fading vectors h (source 1 to relay)
and g (source 2 to relay) as i.i.d. circularly-symmetric complex Gaussians
with unit power per entry: real and imaginary parts are zero-mean normals
of variance 1/2, so |h_m| is Rayleigh and sum_m |h_m|^2 is Gamma(n, 1).

Randomness is organized as keyed streams of a counter-based generator
(numpy's Philox).  Distinct (master_seed, stream_index) pairs map to
distinct generator keys, which makes substream creation O(1), collision
free, and independent of evaluation order, so trials can be farmed out to
any number of workers without changing the draws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

GENERATOR_NAME = "numpy.random.Philox"
#: Half power per real/imaginary component, i.e. E|h_m|^2 = 1.
_COMPONENT_SCALE = np.sqrt(0.5)


@dataclass(frozen=True)
class RngStream:
    """Value object naming one reproducible random stream."""

    master_seed: int
    stream_index: int

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            v = getattr(self, name)
            if not 0 <= v < 2**64:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer, got {v}")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        key = np.array([self.master_seed, self.stream_index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def substream(master_seed: int, stream_index: int) -> RngStream:
    """Stream for trial/block `stream_index` under `master_seed`.

    The (seed, index) -> key mapping is the identity on two 64-bit words,
    so different pairs can never collide.
    """
    return RngStream(master_seed, stream_index)


@dataclass(frozen=True)
class ChannelPair:
    """One joint realization of the two source-relay fading vectors."""

    h: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=np.complex128)
        g = np.asarray(self.g, dtype=np.complex128)
        if h.ndim != 1 or g.ndim != 1 or h.size != g.size:
            raise DimensionError("h and g must be 1-d vectors of equal length")
        if h.size < 1:
            raise DimensionError("channel vectors need at least one antenna entry")
        if not (np.all(np.isfinite(h)) and np.all(np.isfinite(g))):
            raise ValueError("channel entries must be finite")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "g", g)

    @property
    def n(self) -> int:
        return self.h.size


def sample_channel_block(n: int, stream: RngStream, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw `count` channel pairs as two (count, n) complex arrays.

    Pair i of the block is exactly the i-th pair a sequential caller would
    obtain from the same stream (row-major fill), so the block size used by
    a consumer never changes the realizations.
    """
    if n < 1:
        raise DimensionError("antenna count must be >= 1")
    if count < 1:
        raise ValueError("count must be >= 1")
    z = stream.generator().standard_normal((count, 2, 2, n))
    h = _COMPONENT_SCALE * (z[:, 0, 0] + 1j * z[:, 0, 1])
    g = _COMPONENT_SCALE * (z[:, 1, 0] + 1j * z[:, 1, 1])
    return h, g


def sample_channel_pair(n: int, stream: RngStream) -> ChannelPair:
    """Draw a single channel pair; identical streams give identical pairs."""
    h, g = sample_channel_block(n, stream, 1)
    return ChannelPair(h[0], g[0])
