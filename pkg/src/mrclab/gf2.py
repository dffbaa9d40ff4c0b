"""GF(2) linear algebra on int bitsets (bit i of a row int = column i)."""

from __future__ import annotations

from typing import List, Optional

import numpy as np

__all__ = ["pack_rows", "rank", "solve", "in_rowspan"]


def pack_rows(bits: np.ndarray) -> List[int]:
    """Pack a (rows, cols) 0/1 array into python-int bitsets."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    if bits.ndim != 2:
        raise ValueError("expected a 2-d bit array")
    padded = np.packbits(bits, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in padded]


def rank(rows: List[int]) -> int:
    """Rank over GF(2) by most-significant-bit elimination."""
    pivots: dict[int, int] = {}
    r = 0
    for row in rows:
        row = _reduce(row, pivots)
        if row:
            pivots[row.bit_length() - 1] = row
            r += 1
    return r


def _reduce(row: int, pivots: dict) -> int:
    while row:
        b = row.bit_length() - 1
        p = pivots.get(b)
        if p is None:
            return row
        row ^= p
    return 0


def solve(rows: List[int], target: int) -> Optional[int]:
    """Combination bitmask c with XOR of rows[i] over set bits of c == target.

    Returns None when target is outside the rowspan.
    """
    pivots: dict[int, tuple[int, int]] = {}
    for i, row in enumerate(rows):
        comb = 1 << i
        while row:
            b = row.bit_length() - 1
            hit = pivots.get(b)
            if hit is None:
                pivots[b] = (row, comb)
                break
            row ^= hit[0]
            comb ^= hit[1]
    acc = 0
    while target:
        b = target.bit_length() - 1
        hit = pivots.get(b)
        if hit is None:
            return None
        target ^= hit[0]
        acc ^= hit[1]
    return acc


def in_rowspan(rows: List[int], target: int) -> bool:
    return solve(rows, target) is not None
