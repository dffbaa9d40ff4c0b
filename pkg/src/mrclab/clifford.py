"""Clifford gates as conjugation tables over the binary-symplectic group.

A gate of arity a is (M, sigma): M is an element of Sp(2a, F2) whose rows
are the images of X_1, Z_1, ..., X_a, Z_a, and sigma assigns each image an
extra sign.  The full two-qubit Clifford group modulo global phase is
|Sp(4,F2)| * 2^4 = 720 * 16 = 11520 elements; enumerating Sp(4,F2) once
makes uniform sampling exact by construction.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .pauli import PHASE_EXP_TABLE, PauliString

__all__ = [
    "CliffordGate",
    "sample_two_qubit_clifford",
    "symplectic_group",
    "conjugation_tables",
    "two_qubit_group_size",
    "named_gate",
]

TWO_QUBIT_SYMPLECTIC_COUNT = 720
TWO_QUBIT_SIGN_CHOICES = 16


def two_qubit_group_size() -> int:
    """Two-qubit Cliffords up to global phase."""
    return TWO_QUBIT_SYMPLECTIC_COUNT * TWO_QUBIT_SIGN_CHOICES


def _sp_product(u: int, v: int, arity: int) -> int:
    """Symplectic form on bit-packed vectors (x_1, z_1, x_2, z_2, ...)."""
    par = 0
    for q in range(arity):
        ux, uz = (u >> (2 * q)) & 1, (u >> (2 * q + 1)) & 1
        vx, vz = (v >> (2 * q)) & 1, (v >> (2 * q + 1)) & 1
        par ^= (ux & vz) ^ (uz & vx)
    return par


@lru_cache(maxsize=None)
def symplectic_group(arity: int) -> np.ndarray:
    """All of Sp(2*arity, F2) as an (N, 2*arity) array of packed row vectors.

    Rows of each element are images of X_1, Z_1, ..., X_a, Z_a.  Brute-force
    enumeration; arity <= 2 only (|Sp(2)| = 6, |Sp(4)| = 720).
    """
    if arity not in (1, 2):
        raise ValueError("tabulated symplectic groups cover arity 1 and 2 only")
    nbits = 2 * arity
    dim = 1 << nbits
    want = np.zeros((nbits, nbits), dtype=np.uint8)
    for q in range(arity):
        want[2 * q, 2 * q + 1] = want[2 * q + 1, 2 * q] = 1

    sp = np.zeros((dim, dim), dtype=np.uint8)
    for u in range(dim):
        for v in range(dim):
            sp[u, v] = _sp_product(u, v, arity)

    rows = []
    nonzero = list(range(1, dim))
    # depth-first search over row tuples keeps this cheap even for Sp(4)
    def extend(partial):
        k = len(partial)
        if k == nbits:
            rows.append(tuple(partial))
            return
        for cand in nonzero:
            ok = True
            for j, prev in enumerate(partial):
                if sp[prev, cand] != want[j, k]:
                    ok = False
                    break
            if ok:
                extend(partial + [cand])

    extend([])
    out = np.array(rows, dtype=np.uint8)
    expected = {1: 6, 2: 720}[arity]
    assert out.shape[0] == expected, f"Sp({nbits},F2) enumeration found {out.shape[0]}"
    return out


def _site_index(bits: int, q: int) -> int:
    """x + 2*z nibble of qubit q inside a packed vector."""
    return ((bits >> (2 * q)) & 1) + 2 * ((bits >> (2 * q + 1)) & 1)


def _build_lut(m_rows: np.ndarray, arity: int):
    """Conjugation table of the sign-free gate with symplectic rows m_rows.

    Returns (bits, phase): for each input pattern e (packed nibble/byte),
    bits[e] is the packed image and phase[e] the sign bit.  The image of
    W(e) = i^{q(e)} X1^{e0} Z1^{e1} ... is the ordered product of row images.
    """
    n_in = 1 << (2 * arity)
    bits = np.zeros(n_in, dtype=np.uint8)
    phase = np.zeros(n_in, dtype=np.uint8)
    for e in range(n_in):
        exp = 0
        for q in range(arity):  # i^{q(e)} from W(1,1) = i XZ per site
            exp += ((e >> (2 * q)) & 1) * ((e >> (2 * q + 1)) & 1)
        acc = 0
        for k in range(2 * arity):
            if not (e >> k) & 1:
                continue
            b = int(m_rows[k])
            for q in range(arity):
                exp += PHASE_EXP_TABLE[_site_index(acc, q), _site_index(b, q)]
            acc ^= b
        exp %= 4
        assert exp in (0, 2), "conjugated Hermitian string acquired phase i"
        bits[e] = acc
        phase[e] = exp >> 1
    return bits, phase


@lru_cache(maxsize=None)
def conjugation_tables(arity: int):
    """Stacked LUTs for the whole symplectic group of the given arity.

    Returns (bits, phase, sign_parity): bits/phase have shape (N, 4^arity);
    sign_parity[s, e] = popcount(s & e) & 1 folds per-row sign choices in.
    """
    group = symplectic_group(arity)
    n_in = 1 << (2 * arity)
    bits = np.zeros((group.shape[0], n_in), dtype=np.uint8)
    phase = np.zeros((group.shape[0], n_in), dtype=np.uint8)
    for i, m in enumerate(group):
        bits[i], phase[i] = _build_lut(m, arity)
    masks = np.arange(n_in, dtype=np.uint16)
    sign_parity = np.zeros((n_in, n_in), dtype=np.uint8)
    for s in range(n_in):
        v = masks & s
        v = v ^ (v >> 2)
        v = v ^ (v >> 1)
        sign_parity[s] = (v & 1).astype(np.uint8)
    return bits, phase, sign_parity


class CliffordGate:
    """Conjugation action on 1 or 2 qubits, stored as generator images."""

    __slots__ = ("arity", "sym_index", "sign_mask", "_lut_bits", "_lut_sign")

    def __init__(self, arity: int, sym_index: int, sign_mask: int):
        if arity not in (1, 2):
            raise ValueError("arity must be 1 or 2")
        group = symplectic_group(arity)
        if not 0 <= sym_index < group.shape[0]:
            raise ValueError("symplectic index out of range")
        if not 0 <= sign_mask < (1 << (2 * arity)):
            raise ValueError("sign mask out of range")
        self.arity = arity
        self.sym_index = int(sym_index)
        self.sign_mask = int(sign_mask)
        bits, phase, par = conjugation_tables(arity)
        self._lut_bits = bits[self.sym_index]
        self._lut_sign = phase[self.sym_index] ^ par[self.sign_mask]

    # -- construction -----------------------------------------------------
    @classmethod
    def from_images(cls, images: list[PauliString]) -> "CliffordGate":
        """Gate defined by the images of X_1, Z_1, (X_2, Z_2)."""
        arity = len(images) // 2
        if len(images) != 2 * arity or arity not in (1, 2):
            raise ValueError("need 2 or 4 image strings")
        packed = []
        for img in images:
            if img.n != arity:
                raise ValueError("image acts on wrong number of qubits")
            b = 0
            for q in range(arity):
                b |= int(img.x[q]) << (2 * q)
                b |= int(img.z[q]) << (2 * q + 1)
            packed.append(b)
        group = symplectic_group(arity)
        key = np.array(packed, dtype=np.uint8)
        hits = np.nonzero((group == key).all(axis=1))[0]
        if hits.size != 1:
            raise ValueError("images do not preserve commutation relations")
        mask = 0
        for k, img in enumerate(images):
            if img.sign < 0:
                mask |= 1 << k
        return cls(arity, int(hits[0]), mask)

    # -- views ------------------------------------------------------------
    @property
    def lut(self):
        """(bits, sign) conjugation table over input patterns."""
        return self._lut_bits, self._lut_sign

    def images(self) -> list[PauliString]:
        group = symplectic_group(self.arity)
        out = []
        for k in range(2 * self.arity):
            b = int(group[self.sym_index, k])
            x = np.array([(b >> (2 * q)) & 1 for q in range(self.arity)], np.uint8)
            z = np.array([(b >> (2 * q + 1)) & 1 for q in range(self.arity)], np.uint8)
            out.append(PauliString(x, z, -1 if (self.sign_mask >> k) & 1 else 1))
        return out

    def conjugate_pauli(self, p: PauliString, sites) -> PauliString:
        """Image of p under the gate acting on the given (distinct) sites."""
        sites = list(sites)
        if len(sites) != self.arity or len(set(sites)) != self.arity:
            raise ValueError("sites must be distinct and match gate arity")
        e = 0
        for q, s in enumerate(sites):
            e |= int(p.x[s]) << (2 * q)
            e |= int(p.z[s]) << (2 * q + 1)
        out_bits = int(self._lut_bits[e])
        x, z = p.x.copy(), p.z.copy()
        for q, s in enumerate(sites):
            x[s] = (out_bits >> (2 * q)) & 1
            z[s] = (out_bits >> (2 * q + 1)) & 1
        sign = p.sign * (-1 if self._lut_sign[e] else 1)
        return PauliString(x, z, sign)

    def inverse(self) -> "CliffordGate":
        group = symplectic_group(self.arity)
        nbits = 2 * self.arity
        m = group[self.sym_index]
        images = []
        for k in range(nbits):
            # find c with c . M = unit_k, then U^dag W(unit_k) U = s W(c)
            target = 1 << k
            c = None
            for cand in range(1 << nbits):
                acc = 0
                for j in range(nbits):
                    if (cand >> j) & 1:
                        acc ^= int(m[j])
                if acc == target:
                    c = cand
                    break
            assert c is not None
            x = np.array([(c >> (2 * q)) & 1 for q in range(self.arity)], np.uint8)
            z = np.array([(c >> (2 * q + 1)) & 1 for q in range(self.arity)], np.uint8)
            sign = -1 if self._lut_sign[c] else 1
            images.append(PauliString(x, z, sign))
        return CliffordGate.from_images(images)

    def __eq__(self, other):
        return (
            isinstance(other, CliffordGate)
            and self.arity == other.arity
            and self.sym_index == other.sym_index
            and self.sign_mask == other.sign_mask
        )

    def __hash__(self):
        return hash((self.arity, self.sym_index, self.sign_mask))

    def __repr__(self):
        return f"CliffordGate(arity={self.arity}, sym={self.sym_index}, signs={self.sign_mask:0{2*self.arity}b})"


def sample_two_qubit_clifford(rng: np.random.Generator) -> CliffordGate:
    """Exactly uniform draw from the 11520 two-qubit Cliffords (mod phase)."""
    idx = int(rng.integers(0, TWO_QUBIT_SYMPLECTIC_COUNT))
    mask = int(rng.integers(0, TWO_QUBIT_SIGN_CHOICES))
    return CliffordGate(2, idx, mask)


_NAMED_IMAGES = {
    # images of X, Z (arity 1) or X1, Z1, X2, Z2 (arity 2)
    "H": ["Z", "X"],
    "S": ["Y", "Z"],
    "X": ["X", "-Z"],
    "Y": ["-X", "-Z"],
    "Z": ["-X", "Z"],
    "I": ["X", "Z"],
    "CNOT": ["XX", "ZI", "IX", "ZZ"],
    "CZ": ["XZ", "ZI", "ZX", "IZ"],
    "SWAP": ["IX", "IZ", "XI", "ZI"],
}


def named_gate(name: str) -> CliffordGate:
    try:
        labels = _NAMED_IMAGES[name.upper()]
    except KeyError:
        raise ValueError(f"unknown gate {name!r}") from None
    images = []
    for lab in labels:
        sign = -1 if lab.startswith("-") else 1
        images.append(PauliString.from_label(lab.lstrip("+-"), sign))
    return CliffordGate.from_images(images)
