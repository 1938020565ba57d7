"""
Seeded Random Streams.

Provides reproducible, splittable random streams keyed by (seed, stream_id).
Two streams with the same key replay the same sequence; distinct stream ids
are independent through numpy's SeedSequence spawn keys.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np


@dataclass
class RngStream:
    """A numpy Generator bound to a (seed, stream_id) key."""
    seed: int
    stream_id: int = 0
    algorithm: str = "PCG64"

    _generator: Optional[np.random.Generator] = field(
        default=None, init=False, repr=False, compare=False
    )

    @property
    def generator(self) -> np.random.Generator:
        """Lazily created generator; draws advance it."""
        if self._generator is None:
            sequence = np.random.SeedSequence(
                entropy=self.seed & 0xFFFFFFFFFFFFFFFF,
                spawn_key=(self.stream_id & 0xFFFFFFFFFFFFFFFF,),
            )
            bit_generator = getattr(np.random, self.algorithm)(sequence)
            self._generator = np.random.Generator(bit_generator)
        return self._generator

    def fork(self, stream_id: int) -> "RngStream":
        """Fresh stream with the same seed and another stream id."""
        return RngStream(seed=self.seed, stream_id=stream_id, algorithm=self.algorithm)

    def reset(self) -> None:
        """Rewind to the start of the sequence."""
        self._generator = None

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "seed": self.seed,
            "stream_id": self.stream_id,
            "algorithm": self.algorithm,
        }
