"""Symmetric-group elements, integer partitions and irreducible characters.

Everything here is exact: permutations are tuples, characters are integers
computed by the Murnaghan-Nakayama rule on the abacus (bead) encoding, and
the hook-length formula provides an independent dimension oracle.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import factorial

__all__ = [
    "Permutation",
    "all_permutations",
    "partitions",
    "hook_length_dimension",
    "character",
    "cycle_type_classes",
    "class_size",
    "young_cells",
]


class Permutation:
    """Bijection on {0, ..., Q-1} stored as the image tuple."""

    __slots__ = ("images",)

    def __init__(self, images):
        imgs = tuple(int(i) for i in images)
        if sorted(imgs) != list(range(len(imgs))):
            raise ValueError("images are not a bijection")
        self.images = imgs

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, q: int) -> "Permutation":
        return cls(range(q))

    @classmethod
    def cycle(cls, q: int) -> "Permutation":
        """The long cycle (0 1 2 ... q-1)."""
        return cls([(i + 1) % q for i in range(q)])

    @classmethod
    def from_cycles(cls, q: int, cycles) -> "Permutation":
        imgs = list(range(q))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                imgs[a] = b
        return cls(imgs)

    @classmethod
    def replica_swap(cls, n: int, k: int) -> "Permutation":
        """k independent n-cycles on Q = n*k elements: the boundary operator
        that turns Q-replica traces into tr(rho_A^n)^k."""
        imgs = []
        for b in range(k):
            imgs.extend(b * n + ((j + 1) % n) for j in range(n))
        return cls(imgs)

    def __mul__(self, other: "Permutation") -> "Permutation":
        """(self * other)(i) = self(other(i))."""
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        o = other.images
        s = self.images
        return Permutation(tuple(s[o[i]] for i in range(len(s))))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(inv)

    def cycles(self) -> list[tuple[int, ...]]:
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start]:
                continue
            cyc = []
            i = start
            while not seen[i]:
                seen[i] = True
                cyc.append(i)
                i = self.images[i]
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def cycle_count(self) -> int:
        """Number of cycles including fixed points; maximized by identity."""
        return len(self.cycles())

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        cyc = [c for c in self.cycles() if len(c) > 1]
        if not cyc:
            return f"Permutation(e, Q={self.degree})"
        body = "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)
        return f"Permutation({body}, Q={self.degree})"


@lru_cache(maxsize=None)
def all_permutations(q: int) -> tuple[Permutation, ...]:
    if q > 8:
        raise ValueError("S_Q enumeration guarded at Q <= 8")
    return tuple(Permutation(p) for p in itertools.permutations(range(q)))


@lru_cache(maxsize=None)
def partitions(q: int) -> tuple[tuple[int, ...], ...]:
    """All integer partitions of q as weakly decreasing tuples."""

    def gen(rem, maxpart):
        if rem == 0:
            yield ()
            return
        for first in range(min(rem, maxpart), 0, -1):
            for rest in gen(rem - first, first):
                yield (first,) + rest

    return tuple(gen(q, q))


def young_cells(lam) -> list[tuple[int, int]]:
    """Cells (i, j) of the Young diagram, 1-indexed rows and columns."""
    return [(i + 1, j + 1) for i, row in enumerate(lam) for j in range(row)]


def hook_length_dimension(lam) -> int:
    """dim of the S_Q irrep lambda = Q! / product of hook lengths."""
    lam = tuple(lam)
    q = sum(lam)
    cols = [0] * (lam[0] if lam else 0)
    for row in lam:
        for j in range(row):
            cols[j] += 1
    denom = 1
    for i, row in enumerate(lam):
        for j in range(row):
            denom *= (row - j) + (cols[j] - i) - 1
    return factorial(q) // denom


def _beta_to_partition(beta: tuple[int, ...]) -> tuple[int, ...]:
    srt = sorted(beta, reverse=True)
    n = len(srt)
    lam = tuple(srt[i] - (n - 1 - i) for i in range(n))
    return tuple(x for x in lam if x > 0)


@lru_cache(maxsize=None)
def character(lam: tuple, mu: tuple) -> int:
    """Irreducible character chi_lambda on the class of cycle type mu.

    Murnaghan-Nakayama recursion in the abacus encoding: removing a border
    strip of length k moves a bead down k positions; the sign counts the
    beads jumped over.
    """
    lam, mu = tuple(lam), tuple(mu)
    if sum(lam) != sum(mu):
        raise ValueError("partition sizes differ")
    if not mu:
        return 1
    n = max(len(lam), 1)
    beta = tuple(
        (lam[i] if i < len(lam) else 0) + (n - 1 - i) for i in range(n)
    )
    bset = set(beta)
    k = mu[0]
    rest = mu[1:]
    total = 0
    for b in beta:
        lo = b - k
        if lo < 0 or lo in bset:
            continue
        jumped = sum(1 for c in beta if lo < c < b)
        new_beta = tuple(sorted((bset - {b}) | {lo}, reverse=True))
        sub = character(_beta_to_partition(new_beta), rest)
        total += (-1) ** jumped * sub
    return total


def cycle_type_classes(q: int) -> list[tuple[int, ...]]:
    """Conjugacy classes of S_q as cycle types (partitions of q)."""
    return list(partitions(q))


def class_size(mu) -> int:
    """Number of permutations with cycle type mu: q! / z_mu."""
    mu = tuple(mu)
    q = sum(mu)
    z = 1
    for k in set(mu):
        m = mu.count(k)
        z *= k**m * factorial(m)
    return factorial(q) // z
