"""
Counter-based random streams.

Replicate ``r`` of an experiment seeded with ``seed`` always draws from the Philox
stream keyed by ``(seed, r, lane)``, whatever thread or process runs it.
"""

from dataclasses import dataclass
from typing import List, Union

import numpy as np

COEFFICIENT_LANE = 0
AUXILIARY_LANE = 1


@dataclass(frozen=True)
class RngStream:
    """Addressable random stream: master seed, replicate index and lane."""

    seed: int
    index: int = 0
    lane: int = COEFFICIENT_LANE

    def __post_init__(self) -> None:
        if self.seed < 0 or self.index < 0 or self.lane < 0:
            raise ValueError("seed, index and lane must be nonnegative")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.index, self.lane))
        return np.random.Generator(np.random.Philox(sequence))

    def auxiliary(self) -> "RngStream":
        return RngStream(self.seed, self.index, AUXILIARY_LANE)

    @property
    def stream_id(self) -> str:
        return f"{self.seed}:{self.index}:{self.lane}"


def stream_range(seed: int, start: int, count: int) -> List[RngStream]:
    """Streams ``start .. start + count - 1`` of ``seed``."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    return [RngStream(seed, start + offset) for offset in range(count)]


def as_generator(source: Union[RngStream, np.random.Generator]) -> np.random.Generator:
    """Accept either a stream or an already positioned generator."""
    if isinstance(source, RngStream):
        return source.generator()
    if isinstance(source, np.random.Generator):
        return source
    raise TypeError(f"expected RngStream or numpy Generator, got {type(source).__name__}")
