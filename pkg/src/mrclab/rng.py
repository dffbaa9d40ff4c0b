"""Counter-based random streams, one independent stream per work item."""

from __future__ import annotations

import numpy as np

__all__ = ["stream", "child_seed"]


def stream(master_seed: int, index: int = 0) -> np.random.Generator:
    """Philox stream keyed on (master_seed, index).

    Streams for distinct (master_seed, index) pairs are statistically
    independent, so ensembles can be farmed out to workers in any order
    and still replay bit-identically.
    """
    if master_seed < 0 or index < 0:
        raise ValueError("seed and index must be non-negative")
    key = np.array([master_seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def child_seed(master_seed: int, index: int) -> int:
    """Derive a 63-bit scalar seed for kernels that keep their own RNG state."""
    g = stream(master_seed, index)
    return int(g.integers(0, 2**63 - 1))
