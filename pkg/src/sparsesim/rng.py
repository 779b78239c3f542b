"""Deterministic random-stream derivation.

Every randomized routine receives an RngStream and derives child streams by
structural indices (stage number, probe value, chunk index, ...).  Streams are
backed by numpy SeedSequence spawn keys, so the generator a task sees depends
only on the root seed and the task's position in the call tree, never on
thread scheduling or iteration order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RngStream:
    """A node in the seed-derivation tree."""

    entropy: int
    path: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if not isinstance(self.entropy, int) or self.entropy < 0:
            raise ValueError(f"entropy must be a nonnegative int, got {self.entropy!r}")
        if any(not isinstance(i, int) or i < 0 for i in self.path):
            raise ValueError(f"path indices must be nonnegative ints, got {self.path!r}")

    def child(self, *indices: int) -> "RngStream":
        return RngStream(self.entropy, self.path + tuple(int(i) for i in indices))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.entropy, spawn_key=self.path)
        return np.random.Generator(np.random.PCG64(seq))
