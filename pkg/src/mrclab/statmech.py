"""Exact tiny-circuit partition functions of the replica permutation model.

Haar-averaging a monitored circuit maps it onto permutation spins: each
gate carries an in/out pair (tau, sigma) joined by a Weingarten link at
D = d^2, each circuit leg joins neighboring spins with weight d^C (or d if
measured), and pinned boundary permutations encode which moment of the
density matrix is being computed.  The same circuits can be estimated by
Monte Carlo over Haar gates with the dense oracle, which is the module's
cross-validation route.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Optional, Sequence

import numpy as np

from .dense import DenseState, sample_haar_unitary
from .symgroup import Permutation, all_permutations
from .weingarten import weingarten_table

__all__ = [
    "TinyCircuit",
    "exact_partition_function",
    "boundary_for_region",
    "mc_moment",
    "potts_partition_function",
    "fk_partition_function",
]

ENUMERATION_GUARD = 2_000_000


@dataclass(frozen=True)
class TinyCircuit:
    """Ordered operation list on a handful of sites.

    ops entries: ("gate", a, b) for a two-site gate, ("measure", s) for a
    projective measurement of site s in the computational basis.
    """

    n_sites: int
    ops: tuple

    def __post_init__(self):
        for op in self.ops:
            if op[0] == "gate":
                _, a, b = op
                if not (0 <= a < self.n_sites and 0 <= b < self.n_sites and a != b):
                    raise ValueError(f"bad gate sites {op}")
            elif op[0] == "measure":
                if not 0 <= op[1] < self.n_sites:
                    raise ValueError(f"bad measure site {op}")
            else:
                raise ValueError(f"unknown op {op[0]!r}")

    @property
    def n_gates(self) -> int:
        return sum(1 for op in self.ops if op[0] == "gate")

    def wires(self):
        """Wire segments: (source, sink, measured) with source in
        {('init', site), ('out', gate)} and sink in {('in', gate, slot),
        ('top', site)}."""
        src = {s: ("init", s) for s in range(self.n_sites)}
        hot = {s: False for s in range(self.n_sites)}
        out = []
        k = 0
        for op in self.ops:
            if op[0] == "measure":
                hot[op[1]] = True
                continue
            _, a, b = op
            for slot, s in enumerate((a, b)):
                out.append((src[s], ("in", k, slot), hot[s]))
                src[s] = ("out", k)
                hot[s] = False
            k += 1
        for s in range(self.n_sites):
            out.append((src[s], ("top", s), hot[s]))
        return out


def boundary_for_region(n_sites: int, region, q: int) -> dict:
    """Pinned boundary: the long cycle on region sites, identity elsewhere.

    With Q replicas this computes E sum_m tr(rho_A^Q) for unnormalized
    trajectory density matrices."""
    cyc = Permutation.cycle(q)
    e = Permutation.identity(q)
    region = set(region)
    return {s: (cyc if s in region else e) for s in range(n_sites)}


def exact_partition_function(
    circuit: TinyCircuit,
    q: int,
    d: int,
    boundary: dict,
    p=0,
) -> Fraction:
    """Exact rational Z for the pinned boundary permutations.

    p is the per-leg measurement probability applied to every wire leaving
    a gate (explicit measure ops force their wire to the measured weight
    regardless of p); initial-state wires always weigh 1 because all
    replicas share the product state.
    """
    p = Fraction(p)
    group = all_permutations(q)
    ng = len(group)
    index = {g.images: i for i, g in enumerate(group)}
    if len(boundary) != circuit.n_sites:
        raise ValueError("boundary must pin every site")
    bnd = [index[boundary[s].images] for s in range(circuit.n_sites)]

    n_gates = circuit.n_gates
    if ng**n_gates > ENUMERATION_GUARD:
        raise ValueError("free-spin enumeration exceeds the guard")

    cyc = _cycle_count_matrix(q)
    dpow = [Fraction(d) ** c for c in range(q + 1)]
    wg = weingarten_table(q, d * d)
    wg_vec = np.empty((ng, ng), dtype=object)
    for i, gi in enumerate(group):
        for j, gj in enumerate(group):
            wg_vec[i, j] = wg(gi.inverse() * gj)

    def leg_weight(ia: int, ib: int, measured: bool) -> Fraction:
        if measured:
            return Fraction(d)
        base = dpow[cyc[ia][ib]]
        if p == 0:
            return base
        return (1 - p) * base + p * d

    # collect wires by role
    gate_inputs: list[list] = [[] for _ in range(n_gates)]  # (source, measured)
    out_top: list[tuple[int, int, bool]] = []  # (gate, boundary_idx, measured)
    for source, sink, measured in circuit.wires():
        if sink[0] == "in":
            gate_inputs[sink[1]].append((source, measured))
        else:  # top
            s = sink[1]
            if source[0] == "out":
                out_top.append((source[1], bnd[s], measured))
            # init->top wires weigh 1 for any boundary permutation

    @lru_cache(maxsize=None)
    def tau_sum(k: int, sigma_k: int, sources: tuple) -> Fraction:
        """sum_tau Wg(sigma_k^-1 tau) * prod_inputs legweight(source, tau)."""
        acc = Fraction(0)
        for t in range(ng):
            term = wg_vec[sigma_k, t]
            if term == 0:
                acc += 0
                continue
            for (src_idx, measured) in zip(sources, gate_inputs[k]):
                if src_idx == -1:  # init
                    if measured[1]:
                        pass  # weight 1 either way
                    continue
                term *= leg_weight(src_idx, t, measured[1])
            acc += term
        return acc

    total = Fraction(0)
    for assign in itertools.product(range(ng), repeat=n_gates):
        w = Fraction(1)
        for k in range(n_gates):
            sources = tuple(
                assign[src[1]] if src[0] == "out" else -1
                for src, _m in gate_inputs[k]
            )
            w *= tau_sum(k, assign[k], sources)
            if w == 0:
                break
        if w == 0:
            continue
        for gk, b_idx, measured in out_top:
            w *= leg_weight(assign[gk], b_idx, measured)
        total += w
    tau_sum.cache_clear()
    return total


@lru_cache(maxsize=None)
def _cycle_count_matrix(q: int):
    group = all_permutations(q)
    return [[(gi.inverse() * gj).cycle_count() for gj in group] for gi in group]


def mc_moment(
    circuit: TinyCircuit,
    q: int,
    d: int,
    region,
    n_samples: int,
    rng: np.random.Generator,
    p: float = 0.0,
) -> tuple[float, float]:
    """Monte Carlo estimate of E_U sum_m tr(rho_A^q), the dual of the exact
    partition function with the cycle boundary on the region.

    Unnormalized trajectory branches implement the Born weighting; p > 0
    additionally measures every post-gate wire with that probability,
    mirroring the p-averaged link weights.
    """
    region = sorted(set(region))
    vals = np.empty(n_samples)
    d2 = d * d
    for s in range(n_samples):
        ops = []
        for op in circuit.ops:
            ops.append(op)
            if op[0] == "gate" and p > 0:
                for site in op[1:]:
                    if rng.random() < p:
                        ops.append(("measure", site))
        if p > 0:  # boundary wires are measured with probability p as well
            for site in range(circuit.n_sites):
                if rng.random() < p:
                    ops.append(("measure", site))
        branches = [DenseState.zero_state(circuit.n_sites, d).amps]
        for op in ops:
            if op[0] == "gate":
                u = sample_haar_unitary(d2, rng)
                nxt = []
                for amps in branches:
                    st = DenseState(circuit.n_sites, d, amps)
                    st.apply_unitary(u, [op[1], op[2]])
                    nxt.append(st.amps)
                branches = nxt
            else:
                site = op[1]
                nxt = []
                for amps in branches:
                    psi = amps.reshape([d] * circuit.n_sites)
                    psi = np.moveaxis(psi, site, 0).reshape(d, -1)
                    for m in range(d):
                        cut = np.zeros_like(psi)
                        cut[m] = psi[m]
                        back = np.moveaxis(
                            cut.reshape([d] * circuit.n_sites), 0, site
                        ).reshape(-1)
                        if np.abs(back).max() > 1e-14:
                            nxt.append(np.ascontiguousarray(back))
                branches = nxt
        acc = 0.0
        for amps in branches:
            st = DenseState(circuit.n_sites, d, amps)
            if region:
                rho = st.reduced_density(region)
                lam = np.linalg.eigvalsh(rho)
                acc += float((lam**q).sum())
            else:
                acc += float(np.vdot(amps, amps).real ** q)
        vals[s] = acc
    mean = float(vals.mean())
    sem = float(vals.std(ddof=1) / np.sqrt(n_samples)) if n_samples > 1 else 0.0
    return mean, sem


def potts_partition_function(n_vertices: int, bonds: Sequence, n_colors: int, p) -> Fraction:
    """Z of the n_colors-state Potts model with bond weight (1-p) delta + p."""
    p = Fraction(p)
    if n_colors**n_vertices > ENUMERATION_GUARD:
        raise ValueError("Potts enumeration exceeds the guard")
    total = Fraction(0)
    for coloring in itertools.product(range(n_colors), repeat=n_vertices):
        w = Fraction(1)
        for a, b in bonds:
            w *= (1 - p) + p if coloring[a] == coloring[b] else p
        total += w
    return total


def fk_partition_function(n_vertices: int, bonds: Sequence, n_colors: int, p) -> Fraction:
    """Fortuin-Kasteleyn expansion: sum over occupied bond subsets of
    p^{#empty} (1-p)^{#occupied} n_colors^{#clusters}."""
    p = Fraction(p)
    nb = len(bonds)
    total = Fraction(0)
    for mask in range(1 << nb):
        parent = list(range(n_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        occ = 0
        for i, (a, b) in enumerate(bonds):
            if (mask >> i) & 1:
                occ += 1
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb
        clusters = sum(1 for v in range(n_vertices) if find(v) == v)
        total += p ** (nb - occ) * (1 - p) ** occ * Fraction(n_colors) ** clusters
    return total
