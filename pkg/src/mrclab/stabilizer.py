"""Stabilizer states with rank-deficient tableaus (mixed states allowed).

No destabilizers are tracked: a state is just r <= n independent commuting
signed Pauli generators, so the maximally mixed state is r = 0 and
projective measurement can grow the rank, which is what the purification
protocol needs.  Measurement therefore costs an O(n*r) elimination in the
deterministic branch.
"""

from __future__ import annotations

import os
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from . import gf2
from .clifford import CliffordGate, conjugation_tables
from .pauli import PauliString

__all__ = ["StabilizerState", "DEBUG_CHECKS"]

# every mutation re-checks the symplectic invariants when enabled
DEBUG_CHECKS = bool(int(os.environ.get("MRCLAB_DEBUG", "0")))


def _pack_bits(bits: np.ndarray, nw: int) -> np.ndarray:
    packed = np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little")
    packed = np.pad(packed, (0, 8 * nw - packed.size))
    return packed.view(np.uint64)


class StabilizerState:
    """Generating set of a stabilizer group on n qubits; rank r <= n."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least one qubit")
        self.n = int(n)
        self.nw = (n + 63) // 64
        cap = n
        self._xw = np.zeros((cap, self.nw), dtype=np.uint64)
        self._zw = np.zeros((cap, self.nw), dtype=np.uint64)
        self._signs = np.zeros(cap, dtype=np.uint8)
        self.r = 0
        # reusable workspaces for measurement / rank kernels
        self._scratch = np.zeros((cap, 2 * self.nw), dtype=np.uint64)
        self._comb = np.zeros((cap, (cap + 63) // 64), dtype=np.uint64)
        self._acc = np.zeros(2 * self.nw, dtype=np.uint64)
        self._used = np.zeros((cap + 63) // 64, dtype=np.uint64)
        self._anti = np.zeros(cap, dtype=np.int64)
        self._units_z = None
        self._units_x = None
        self._zero_words = np.zeros(self.nw, dtype=np.uint64)

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero_state(cls, n: int) -> "StabilizerState":
        """|0...0>, stabilized by Z_i."""
        st = cls(n)
        for i in range(n):
            st._zw[i, i >> 6] = np.uint64(1) << np.uint64(i & 63)
        st.r = n
        return st

    @classmethod
    def plus_state(cls, n: int) -> "StabilizerState":
        st = cls(n)
        for i in range(n):
            st._xw[i, i >> 6] = np.uint64(1) << np.uint64(i & 63)
        st.r = n
        return st

    @classmethod
    def maximally_mixed(cls, n: int) -> "StabilizerState":
        return cls(n)

    @classmethod
    def from_generators(cls, gens: Sequence[PauliString]) -> "StabilizerState":
        if not gens:
            raise ValueError("empty generator list; use maximally_mixed(n)")
        n = gens[0].n
        st = cls(n)
        for g in gens:
            if g.n != n:
                raise ValueError("generator length mismatch")
            st._xw[st.r] = _pack_bits(g.x, st.nw)
            st._zw[st.r] = _pack_bits(g.z, st.nw)
            st._signs[st.r] = 0 if g.sign > 0 else 1
            st.r += 1
        st.check()
        return st

    # -- views ---------------------------------------------------------------
    def generators(self) -> list[PauliString]:
        out = []
        for i in range(self.r):
            x = np.unpackbits(self._xw[i].view(np.uint8), bitorder="little")[: self.n]
            z = np.unpackbits(self._zw[i].view(np.uint8), bitorder="little")[: self.n]
            out.append(PauliString(x, z, -1 if self._signs[i] else 1))
        return out

    @property
    def rank(self) -> int:
        return self.r

    def copy(self) -> "StabilizerState":
        st = StabilizerState(self.n)
        st._xw[: self.r] = self._xw[: self.r]
        st._zw[: self.r] = self._zw[: self.r]
        st._signs[: self.r] = self._signs[: self.r]
        st.r = self.r
        return st

    # -- unitaries ----------------------------------------------------------
    def apply_gate(self, gate: CliffordGate, sites: Iterable[int]) -> None:
        """Conjugate every generator through the gate on the given sites."""
        sites = np.asarray(list(sites), dtype=np.int64)
        if sites.size != gate.arity:
            raise ValueError("site count does not match gate arity")
        if np.unique(sites).size != sites.size:
            raise ValueError("duplicate sites")
        if sites.min() < 0 or sites.max() >= self.n:
            raise IndexError("site index out of range")
        bits, sign = gate.lut
        K.apply_gate_sites(self._xw, self._zw, self._signs, self.r, sites, bits, sign)
        if DEBUG_CHECKS:
            self.check()

    def apply_gate_layer(self, bonds: np.ndarray, sym_idx: np.ndarray, smask: np.ndarray) -> None:
        """Fast path: one brickwork layer of disjoint two-qubit gates.

        bonds is (nb, 2) site pairs; sym_idx/smask index the global two-qubit
        conjugation tables.
        """
        bits, phase, par = conjugation_tables(2)
        lut_bits = bits[sym_idx]
        lut_sign = phase[sym_idx] ^ par[smask]
        K.apply_gate_layer(
            self._xw,
            self._zw,
            self._signs,
            self.r,
            np.ascontiguousarray(bonds[:, 0], dtype=np.int64),
            np.ascontiguousarray(bonds[:, 1], dtype=np.int64),
            np.ascontiguousarray(lut_bits),
            np.ascontiguousarray(lut_sign),
        )
        if DEBUG_CHECKS:
            self.check()

    # -- measurement ----------------------------------------------------------
    def _unit_words(self, site: int, kind: str) -> np.ndarray:
        if self._units_z is None:
            self._units_z = np.zeros((self.n, self.nw), dtype=np.uint64)
            self._units_x = np.zeros((self.n, self.nw), dtype=np.uint64)
            for i in range(self.n):
                self._units_z[i, i >> 6] = np.uint64(1) << np.uint64(i & 63)
                self._units_x[i, i >> 6] = np.uint64(1) << np.uint64(i & 63)
        return (self._units_x if kind == "x" else self._units_z)[site]

    def measure_z(self, site: int, rng: np.random.Generator):
        """Projective Z measurement; returns (outcome, was_deterministic)."""
        return self._measure_packed(
            self._zero_words, self._unit_words(site, "z"), 1, rng
        )

    def measure_x(self, site: int, rng: np.random.Generator):
        return self._measure_packed(
            self._unit_words(site, "x"), self._zero_words, 1, rng
        )

    def measure_zz(self, i: int, j: int, rng: np.random.Generator):
        oz = self._unit_words(i, "z") | self._unit_words(j, "z")
        return self._measure_packed(self._zero_words, oz, 1, rng)

    def measure_pauli(self, obs: PauliString, rng: np.random.Generator):
        """Measure a Hermitian Pauli string (outcome in {+1,-1})."""
        if obs.n != self.n:
            raise ValueError("observable length mismatch")
        ox = _pack_bits(obs.x, self.nw)
        oz = _pack_bits(obs.z, self.nw)
        return self._measure_packed(ox, oz, obs.sign, rng)

    def _measure_packed(self, ox, oz, obs_sign: int, rng):
        n_anti = K.anticommuting_rows(
            self._xw, self._zw, self.r, self.nw, ox, oz, self._anti
        )
        if n_anti > 0:
            bit = int(rng.random() < 0.5)  # Born rule: +/-1 equiprobable
            K.collapse_anticommuting(
                self._xw, self._zw, self._signs, self.nw,
                self._anti, n_anti, ox, oz, np.uint8(bit),
            )
            outcome = (1 - 2 * bit) * obs_sign
            deterministic = False
        else:
            sbit = K.membership_sign(
                self._xw, self._zw, self._signs, self.r, self.nw, ox, oz,
                self._scratch, self._comb, self._acc, self._used,
            )
            if sbit >= 0:
                outcome = (1 - 2 * int(sbit)) * obs_sign
                deterministic = True
            else:
                # commutes but outside the group: measurement purifies
                bit = int(rng.random() < 0.5)
                K.append_row(
                    self._xw, self._zw, self._signs, self.r, self.nw,
                    ox, oz, np.uint8(bit),
                )
                self.r += 1
                outcome = (1 - 2 * bit) * obs_sign
                deterministic = False
        if DEBUG_CHECKS:
            self.check()
        return outcome, deterministic

    def expectation_pauli(self, obs: PauliString) -> int:
        """<obs> for stabilizer states: +/-1 on group members, else 0."""
        if obs.n != self.n:
            raise ValueError("observable length mismatch")
        ox = _pack_bits(obs.x, self.nw)
        oz = _pack_bits(obs.z, self.nw)
        n_anti = K.anticommuting_rows(
            self._xw, self._zw, self.r, self.nw, ox, oz, self._anti
        )
        if n_anti > 0:
            return 0
        sbit = K.membership_sign(
            self._xw, self._zw, self._signs, self.r, self.nw, ox, oz,
            self._scratch, self._comb, self._acc, self._used,
        )
        if sbit < 0:
            return 0
        return (1 - 2 * int(sbit)) * obs.sign

    # -- entropies -------------------------------------------------------------
    def _region_mask(self, region) -> np.ndarray:
        mask = np.zeros(self.n, dtype=np.uint8)
        region = np.asarray(list(region), dtype=np.int64)
        if region.size:
            if region.min() < 0 or region.max() >= self.n:
                raise IndexError("region site out of range")
            mask[region] = 1
        return _pack_bits(mask, self.nw)

    def region_entropy(self, region) -> int:
        """Entanglement entropy S_A in bits, valid for mixed states.

        S_A = |A| - (r - rank of generators projected on the complement);
        reduces to rank(G|_A) - |A| for pure states and to |A| for the
        maximally mixed state (dense-oracle checked).
        """
        region = list(region)
        n_a = len(set(region))
        if n_a == 0:
            return 0
        comp_mask = self._region_mask(region) ^ _pack_bits(
            np.ones(self.n, dtype=np.uint8), self.nw
        )
        rank_comp = K.masked_rank(
            self._xw, self._zw, self.r, self.nw, comp_mask, self._scratch
        )
        return n_a - (self.r - int(rank_comp))

    def cut_entropy(self, cut: int) -> int:
        """Entropy of the prefix region [0, cut)."""
        return self.region_entropy(range(cut))

    @property
    def total_entropy(self) -> int:
        """n - r bits; 0 for pure states."""
        return self.n - self.r

    # -- invariants ----------------------------------------------------------
    def check(self) -> None:
        """Assert commutation, independence and no -identity generator."""
        r = self.r
        if r == 0:
            return
        out = np.zeros((r, r), dtype=np.uint8)
        K.commute_parity_all(self._xw, self._zw, r, self.nw, out)
        if out.any():
            raise AssertionError("generators do not all commute")
        rows = [
            int.from_bytes(self._xw[i].tobytes() + self._zw[i].tobytes(), "little")
            for i in range(r)
        ]
        if gf2.rank(rows) != r:
            raise AssertionError("generators are linearly dependent")
        for i in range(r):
            if not rows[i] and self._signs[i]:
                raise AssertionError("-identity in generating set")
