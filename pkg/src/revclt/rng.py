"""Counter-based random streams.

Every replicate owns a Philox generator keyed by ``(seed, stream_id)``.  A
purpose tag occupies the top word of the starting counter, so draws for
different jobs of the same replicate never overlap and never depend on the
order in which replicates are scheduled.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

__all__ = ["RngStream", "purpose_tag"]

_MASK64 = (1 << 64) - 1


def purpose_tag(purpose: str) -> int:
    """Stable 64-bit tag for a purpose label."""
    return int.from_bytes(hashlib.blake2b(purpose.encode(), digest_size=8).digest(), "little")


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0
    purpose: str = "default"

    def __post_init__(self):
        if not (0 <= self.seed <= _MASK64 and 0 <= self.stream_id <= _MASK64):
            raise ValueError("seed and stream_id must be unsigned 64-bit integers")

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        counter = np.array([0, 0, 0, purpose_tag(self.purpose)], dtype=np.uint64)
        bg = np.random.Philox(key=np.array([self.seed, self.stream_id], dtype=np.uint64), counter=counter)
        return np.random.Generator(bg)

    def child(self, purpose: str) -> "RngStream":
        return RngStream(self.seed, self.stream_id, purpose)

    def replicate(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id, self.purpose)
