from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RandomStream:
    """Identifier of an independent counter-based random stream.

    The stream is a Philox generator keyed by ``(master_seed, index)``; the same key
    always reproduces the same draws, whatever thread or process consumes it.
    """
    master_seed: int
    index: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, index: int) -> 'RandomStream':
        # nested streams fold the parent index into the seed so that
        # (seed, a).child(b) and (seed, b).child(a) never collide
        folded = (self.master_seed * 0x9E3779B97F4A7C15 + self.index + 1) % (1 << 64)
        return RandomStream(folded, index)
