"""Random-stream plumbing shared by the samplers.

Everything takes a :class:`numpy.random.Generator`; seeds are turned into
PCG64 streams through :class:`numpy.random.SeedSequence`, and independent
workers get ``rng.spawn(k)`` children.
"""

from __future__ import annotations

import numpy as np

_WORD = 1 << 63


def make_rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def randbelow(rng: np.random.Generator, m: int) -> int:
    """Exactly uniform integer in [0, m) for arbitrary-precision ``m``."""
    if m <= 0:
        raise ValueError("m must be positive")
    if m <= _WORD:
        return int(rng.integers(m))
    k = m.bit_length()
    nbytes = (k + 7) // 8
    excess = 8 * nbytes - k
    while True:
        x = int.from_bytes(rng.bytes(nbytes), "little") >> excess
        if x < m:
            return x
