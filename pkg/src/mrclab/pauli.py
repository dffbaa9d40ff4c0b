"""Signed n-qubit Pauli strings in binary-symplectic form.

A site with bits (x, z) carries the Hermitian operator W(x, z):
W(0,0)=I, W(1,0)=X, W(0,1)=Z, W(1,1)=Y.  A string is sign * tensor of W's
with sign in {+1, -1}; imaginary global phases cannot occur for Hermitian
strings and are rejected.
"""

from __future__ import annotations

import numpy as np

__all__ = ["PauliString", "PHASE_EXP_TABLE", "single_site_matrices"]

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# index = x + 2*z  ->  I, X, Z, Y
_SITE_OPS = (_I, _X, _Z, _Y)
_SITE_NAMES = "IXZY"


def single_site_matrices():
    """The four W(x,z) matrices indexed by x + 2*z."""
    return _SITE_OPS


def _build_phase_table() -> np.ndarray:
    """exp[a, b] = k with W(a) @ W(b) = i^k W(a ^ b), a, b in 0..3."""
    table = np.zeros((4, 4), dtype=np.int8)
    for a in range(4):
        for b in range(4):
            prod = _SITE_OPS[a] @ _SITE_OPS[b]
            ref = _SITE_OPS[a ^ b]
            for k in range(4):
                if np.allclose(prod, (1j**k) * ref):
                    table[a, b] = k
                    break
            else:  # pragma: no cover - table is exact
                raise AssertionError("pauli product is not a pauli")
    return table


# i-exponent of the single-site product, indexed [x1 + 2*z1, x2 + 2*z2]
PHASE_EXP_TABLE = _build_phase_table()


class PauliString:
    """Hermitian Pauli operator: sign * W(x_0,z_0) (x) ... (x) W(x_{n-1},z_{n-1})."""

    __slots__ = ("x", "z", "sign")

    def __init__(self, x, z, sign: int = 1):
        self.x = np.ascontiguousarray(x, dtype=np.uint8) & 1
        self.z = np.ascontiguousarray(z, dtype=np.uint8) & 1
        if self.x.shape != self.z.shape or self.x.ndim != 1 or self.x.size < 1:
            raise ValueError("x and z must be equal-length 1-d bit vectors")
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.sign = int(sign)

    @property
    def n(self) -> int:
        return self.x.size

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))

    @classmethod
    def from_label(cls, label: str, sign: int = 1) -> "PauliString":
        """Build from a string like 'XIZY'."""
        x = np.zeros(len(label), dtype=np.uint8)
        z = np.zeros(len(label), dtype=np.uint8)
        for i, ch in enumerate(label.upper()):
            if ch == "X":
                x[i] = 1
            elif ch == "Z":
                z[i] = 1
            elif ch == "Y":
                x[i] = z[i] = 1
            elif ch != "I":
                raise ValueError(f"unknown pauli letter {ch!r}")
        return cls(x, z, sign)

    @classmethod
    def single(cls, n: int, site: int, kind: str, sign: int = 1) -> "PauliString":
        p = cls.identity(n)
        if kind == "X":
            p.x[site] = 1
        elif kind == "Z":
            p.z[site] = 1
        elif kind == "Y":
            p.x[site] = p.z[site] = 1
        else:
            raise ValueError(f"unknown pauli letter {kind!r}")
        p.sign = sign
        return p

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def commutes_with(self, other: "PauliString") -> bool:
        """Symplectic form: parity of x1.z2 + z1.x2 (0 means commute)."""
        if other.n != self.n:
            raise ValueError("length mismatch")
        par = int(np.bitwise_xor.reduce(self.x & other.z))
        par ^= int(np.bitwise_xor.reduce(self.z & other.x))
        return par == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        if other.n != self.n:
            raise ValueError("length mismatch")
        a = self.x + 2 * self.z
        b = other.x + 2 * other.z
        k = int(PHASE_EXP_TABLE[a, b].sum()) % 4
        if k % 2:
            raise ValueError("product is anti-Hermitian (operators anticommute)")
        sign = self.sign * other.sign * (1 if k == 0 else -1)
        return PauliString(self.x ^ other.x, self.z ^ other.z, sign)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliString)
            and self.sign == other.sign
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self):
        return hash((self.sign, self.x.tobytes(), self.z.tobytes()))

    def label(self) -> str:
        body = "".join(_SITE_NAMES[xb + 2 * zb] for xb, zb in zip(self.x, self.z))
        return ("+" if self.sign > 0 else "-") + body

    def __repr__(self) -> str:
        return f"PauliString({self.label()!r})"

    def weight_support(self) -> np.ndarray:
        """Indices of non-identity sites."""
        return np.nonzero(self.x | self.z)[0]

    def rightmost(self) -> int:
        """Rightmost non-identity site, -1 for the identity string."""
        sup = self.weight_support()
        return int(sup[-1]) if sup.size else -1

    def to_matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix (small n only)."""
        if self.n > 12:
            raise ValueError("dense matrix limited to n <= 12")
        out = np.array([[self.sign]], dtype=complex)
        for xb, zb in zip(self.x, self.z):
            out = np.kron(out, _SITE_OPS[xb + 2 * zb])
        return out
