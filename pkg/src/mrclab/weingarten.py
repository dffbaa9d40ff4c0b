"""Weingarten functions and the Boltzmann weights of the replica spin model.

All arithmetic is exact rational: Weingarten cancellations are catastrophic
in floating point.  Tables are built two independent ways (character
formula vs Gram-matrix inversion) and must agree exactly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial

from .symgroup import (
    Permutation,
    all_permutations,
    character,
    class_size,
    hook_length_dimension,
    partitions,
    young_cells,
)

__all__ = [
    "WeingartenTable",
    "weingarten_table",
    "link_weight",
    "triangle_weight",
    "triangle_weight_diluted",
    "factorization_deviation",
    "potts_triangle_weight",
]

MAX_Q = 8
TRIANGLE_MAX_Q = 6


class WeingartenTable:
    """Class function Wg_D on S_Q as exact rationals per cycle type."""

    def __init__(self, q: int, dim, values: dict):
        self.q = q
        self.dim = Fraction(dim)
        self.values = dict(values)

    def __call__(self, g) -> Fraction:
        key = g.cycle_type() if isinstance(g, Permutation) else tuple(g)
        return self.values[key]

    def items(self):
        return sorted(self.values.items())

    def check_orthogonality(self) -> bool:
        """sum_{g1} Wg_D(g1^{-1} g2) D^{C(g1)} = delta_{g2,e}, exactly.

        The printed form of this relation carries D^{C(g2)} outside the
        sum, which cannot hold for fixed g2; the convolution below is the
        inverse relation the surrounding text defines.
        """
        group = all_permutations(self.q)
        for g2 in group:
            acc = Fraction(0)
            for g1 in group:
                acc += self(g1.inverse() * g2) * self.dim ** g1.cycle_count()
            want = Fraction(1) if g2.cycle_count() == self.q else Fraction(0)
            if acc != want:
                return False
        return True


def _check_args(q: int, dim: int):
    if q < 1 or q > MAX_Q:
        raise ValueError(f"Q={q} outside the guard 1..{MAX_Q}")
    if dim < q:
        raise ValueError(
            f"D={dim} < Q={q} makes the character formula singular (D-i+j=0)"
        )


@lru_cache(maxsize=None)
def weingarten_table(q: int, dim: int, method: str = "characters") -> WeingartenTable:
    """Exact Weingarten table for S_q at dimension parameter D=dim.

    method='characters' evaluates
        Wg_D(g) = (1/q!) sum_lam chi_lam(e) chi_lam(g) / prod_{(i,j)} (D-i+j)
    while method='gram' solves the q! x q! linear system making Wg the
    convolution inverse of D^C(g).
    """
    _check_args(q, dim)
    if method == "characters":
        values = {}
        for mu in partitions(q):
            acc = Fraction(0)
            for lam in partitions(q):
                denom = 1
                for (i, j) in young_cells(lam):
                    denom *= dim - i + j
                acc += Fraction(hook_length_dimension(lam) * character(lam, mu), denom)
            values[mu] = acc / factorial(q)
        return WeingartenTable(q, dim, values)
    if method == "gram":
        return _gram_inversion_table(q, dim)
    raise ValueError(f"unknown method {method!r}")


def _gram_inversion_table(q: int, dim: int) -> WeingartenTable:
    """Invert G(s,t) = D^{C(s t^{-1})} over the rationals (one column)."""
    group = all_permutations(q)
    ng = len(group)
    index = {g.images: i for i, g in enumerate(group)}
    e_idx = index[tuple(range(q))]
    a = [[Fraction(0)] * (ng + 1) for _ in range(ng)]
    for i, s in enumerate(group):
        s_inv = s.inverse()
        for j, t in enumerate(group):
            a[i][j] = Fraction(dim ** (s * t.inverse()).cycle_count())
        a[i][ng] = Fraction(1) if i == e_idx else Fraction(0)
    # gaussian elimination with partial pivoting over Q
    for col in range(ng):
        piv = next(r for r in range(col, ng) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(ng):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [vr - f * vc for vr, vc in zip(a[r], a[col])]
    values: dict = {}
    for j, t in enumerate(group):
        key = t.cycle_type()
        val = a[j][ng]
        if key in values and values[key] != val:
            raise AssertionError("gram inverse is not a class function")
        values[key] = val
    return WeingartenTable(q, dim, values)


def link_weight(g1: Permutation, g2: Permutation, d: int, p) -> Fraction:
    """Measurement-averaged weight of a circuit leg between permutations:
    (1-p) d^{C(g1^{-1} g2)} + p d."""
    p = Fraction(p)
    c = (g1.inverse() * g2).cycle_count()
    return (1 - p) * Fraction(d) ** c + p * d


def _leg_weight_diluted(g1: Permutation, g2: Permutation, d: int, measured: bool) -> Fraction:
    if measured:
        return Fraction(d)
    return Fraction(d) ** (g1.inverse() * g2).cycle_count()


def triangle_weight(gi, gj, gk, d: int, p, q: int) -> Fraction:
    """Down-triangle weight with the middle spin summed out:
    J_p = sum_l W_p(gi^{-1} gl) W_p(gj^{-1} gl) Wg_D(gl^{-1} gk), D = d^2."""
    if q > TRIANGLE_MAX_Q:
        raise ValueError(f"triangle sum guarded at Q <= {TRIANGLE_MAX_Q}")
    wg = weingarten_table(q, d * d)
    acc = Fraction(0)
    for gl in all_permutations(q):
        acc += (
            link_weight(gi, gl, d, p)
            * link_weight(gj, gl, d, p)
            * wg(gl.inverse() * gk)
        )
    return acc


def triangle_weight_diluted(gi, gj, gk, d: int, q: int, measured: tuple) -> Fraction:
    """Triangle weight for fixed measurement locations on the two legs."""
    if q > TRIANGLE_MAX_Q:
        raise ValueError(f"triangle sum guarded at Q <= {TRIANGLE_MAX_Q}")
    wg = weingarten_table(q, d * d)
    acc = Fraction(0)
    for gl in all_permutations(q):
        acc += (
            _leg_weight_diluted(gi, gl, d, measured[0])
            * _leg_weight_diluted(gj, gl, d, measured[1])
            * wg(gl.inverse() * gk)
        )
    return acc


def potts_triangle_weight(gi, gj, gk, p) -> Fraction:
    """Infinite-d factorized form: ((1-p) delta + p)((1-p) delta + p)."""
    p = Fraction(p)
    fi = (1 - p) + p if gi == gk else p
    fj = (1 - p) + p if gj == gk else p
    return Fraction(fi) * Fraction(fj)


def factorization_deviation(d: int, q: int, p) -> Fraction:
    """Distance of the normalized triangle weight from its infinite-d limit.

    Each measurement configuration of the two legs is normalized by its
    leading scale (d^Q per unmeasured leg, d per measured leg, D^Q for the
    Weingarten link); the p-average of these normalized weights converges
    elementwise to the factorized form, and the max-norm gap shrinks
    monotonically in d.  The annealed weight of triangle_weight itself
    does not converge at fixed integer Q; the limit is a replica-limit
    statement, so the configuration-resolved normalization is the honest
    finite-Q check.
    """
    p = Fraction(p)
    group = all_permutations(q)
    dd = Fraction(d)
    worst = Fraction(0)
    for gi in group:
        for gj in group:
            for gk in group:
                acc = Fraction(0)
                for mi in (False, True):
                    for mj in (False, True):
                        w = triangle_weight_diluted(gi, gj, gk, d, q, (mi, mj))
                        scale = (dd**q if not mi else dd) * (
                            dd**q if not mj else dd
                        ) / (dd * dd) ** q
                        prob = (p if mi else 1 - p) * (p if mj else 1 - p)
                        acc += prob * w / scale
                gap = abs(acc - potts_triangle_weight(gi, gj, gk, p))
                if gap > worst:
                    worst = gap
    return worst
