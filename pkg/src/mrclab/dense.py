"""Exact state-vector oracle for small systems.

Ground truth for the stabilizer engine and the Monte Carlo side of the
replica stat-mech checks: Haar and charge-block gate sampling, projective
measurement with the same RNG discipline as the stabilizer engine, and
exact Renyi entropies.
"""

from __future__ import annotations

import numpy as np

from .clifford import CliffordGate
from .pauli import PauliString
from .stabilizer import StabilizerState

__all__ = [
    "DenseState",
    "sample_haar_unitary",
    "sample_u1_block_unitary",
    "u1_charge_operator",
    "clifford_unitary",
    "stabilizer_density_matrix",
    "renyi_from_density",
]

MAX_AMPLITUDES = 1 << 26
_DET_EPS = 1e-9


def sample_haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary via QR of a complex Ginibre matrix with phase fixing."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    # normalize the diagonal of R to positive reals, otherwise the
    # distribution is biased by the QR phase convention
    ph = np.diag(r).copy()
    ph /= np.abs(ph)
    return q * ph.conj()


def sample_u1_block_unitary(d_neutral: int, rng: np.random.Generator) -> np.ndarray:
    """Charge-conserving two-site gate, sites carrying qubit (x) qudit.

    Independent Haar blocks of sizes d^2 / 2d^2 / d^2 in the total-charge
    0/1/2 sectors; the site basis index is q*d + a with charge q in {0,1}.
    """
    if d_neutral < 1:
        raise ValueError("d_neutral must be >= 1")
    d = d_neutral
    site = 2 * d
    dim = site * site
    charge = [(i // (d * site)) + ((i % site) // d) for i in range(dim)]
    u = np.zeros((dim, dim), dtype=complex)
    for q in (0, 1, 2):
        idx = [i for i in range(dim) if charge[i] == q]
        block = sample_haar_unitary(len(idx), rng)
        u[np.ix_(idx, idx)] = block
    return u


def u1_charge_operator(d_neutral: int) -> np.ndarray:
    """Total charge of two qubit-qudit sites, diagonal in the working basis."""
    d = d_neutral
    site = 2 * d
    dim = site * site
    q = np.array([(i // (d * site)) + ((i % site) // d) for i in range(dim)])
    return np.diag(q.astype(float))


class DenseState:
    """Normalized state vector on n_sites qudits of local dimension d."""

    def __init__(self, n_sites: int, d: int = 2, amplitudes=None):
        if d < 2:
            raise ValueError("local dimension must be >= 2")
        if d**n_sites > MAX_AMPLITUDES:
            raise ValueError(
                f"d^n = {d}^{n_sites} exceeds the oracle guard of 2^26 amplitudes"
            )
        self.n = int(n_sites)
        self.d = int(d)
        if amplitudes is None:
            amps = np.zeros(d**n_sites, dtype=complex)
            amps[0] = 1.0
        else:
            amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
            if amps.size != d**n_sites:
                raise ValueError("amplitude vector has wrong length")
        self.amps = amps

    @classmethod
    def zero_state(cls, n_sites: int, d: int = 2) -> "DenseState":
        return cls(n_sites, d)

    @classmethod
    def plus_state(cls, n_sites: int) -> "DenseState":
        amps = np.full(2**n_sites, 2 ** (-n_sites / 2), dtype=complex)
        return cls(n_sites, 2, amps)

    def copy(self) -> "DenseState":
        return DenseState(self.n, self.d, self.amps.copy())

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    # -- dynamics ----------------------------------------------------------
    def apply_unitary(self, u: np.ndarray, sites) -> None:
        """Apply a gate on the listed sites (site 0 = leftmost tensor factor)."""
        sites = list(sites)
        k = len(sites)
        if u.shape != (self.d**k, self.d**k):
            raise ValueError("gate dimension does not match site count")
        if len(set(sites)) != k or min(sites) < 0 or max(sites) >= self.n:
            raise ValueError("bad site list")
        psi = self.amps.reshape([self.d] * self.n)
        psi = np.moveaxis(psi, sites, range(k))
        shape = psi.shape
        psi = u @ psi.reshape(self.d**k, -1)
        psi = np.moveaxis(psi.reshape(shape), range(k), sites)
        self.amps = np.ascontiguousarray(psi).reshape(-1)

    def apply_clifford(self, gate: CliffordGate, sites) -> None:
        if self.d != 2:
            raise ValueError("clifford gates act on qubits")
        self.apply_unitary(clifford_unitary(gate), sites)

    # -- measurement ---------------------------------------------------------
    def _site_probabilities(self, site: int, basis=None) -> np.ndarray:
        psi = self.amps.reshape([self.d] * self.n)
        psi = np.moveaxis(psi, site, 0).reshape(self.d, -1)
        if basis is not None:
            psi = basis.conj().T @ psi
        return (np.abs(psi) ** 2).sum(axis=1)

    def measure_site(self, site: int, rng: np.random.Generator, basis=None):
        """Projective measurement of one site; returns the outcome index.

        Zero-probability branches are never sampled, and strictly
        deterministic outcomes consume no randomness so Clifford
        trajectories replay against the stabilizer engine draw for draw.
        """
        probs = self._site_probabilities(site, basis)
        probs = probs / probs.sum()
        snapped = probs.copy()
        for target in (0.0, 0.5, 1.0):
            snapped[np.abs(probs - target) < _DET_EPS] = target
        live = np.nonzero(snapped > 0)[0]
        if live.size == 1:
            outcome = int(live[0])
        else:
            u = rng.random()
            cum = np.cumsum(snapped)
            outcome = int(np.searchsorted(cum, u * cum[-1], side="right"))
            outcome = min(outcome, self.d - 1)
        self._project_site(site, outcome, basis)
        return outcome

    def measure_z(self, site: int, rng: np.random.Generator):
        """Qubit Z measurement; (+1, was_deterministic) convention matches
        the stabilizer engine: deterministic outcomes consume no draws and
        a random outcome is -1 exactly when the uniform draw is < 1/2."""
        if self.d != 2:
            raise ValueError("Z measurement defined for qubits")
        probs = self._site_probabilities(site)
        p0 = probs[0] / probs.sum()
        if p0 > 1 - _DET_EPS:
            self._project_site(site, 0, None)
            return +1, True
        if p0 < _DET_EPS:
            self._project_site(site, 1, None)
            return -1, True
        u = rng.random()
        p1 = 1.0 - p0
        if abs(p1 - 0.5) < _DET_EPS:
            p1 = 0.5
        outcome_index = 1 if u < p1 else 0
        self._project_site(site, outcome_index, None)
        return (1 - 2 * outcome_index), False

    def _project_site(self, site: int, outcome: int, basis) -> None:
        psi = self.amps.reshape([self.d] * self.n)
        psi = np.moveaxis(psi, site, 0).reshape(self.d, -1)
        if basis is not None:
            rot = basis.conj().T @ psi
            rot[np.arange(self.d) != outcome] = 0
            psi = basis @ rot
        else:
            keep = psi[outcome].copy()
            psi = np.zeros_like(psi)
            psi[outcome] = keep
        psi = psi / np.linalg.norm(psi)
        psi = np.moveaxis(psi.reshape([self.d] * self.n), 0, site)
        self.amps = np.ascontiguousarray(psi).reshape(-1)

    # -- observables -----------------------------------------------------------
    def reduced_density(self, region) -> np.ndarray:
        region = sorted(set(region))
        k = len(region)
        psi = self.amps.reshape([self.d] * self.n)
        psi = np.moveaxis(psi, region, range(k)).reshape(self.d**k, -1)
        return psi @ psi.conj().T

    def renyi_entropy(self, region, order: float = 1.0) -> float:
        """Renyi-n entanglement entropy of the region, in bits."""
        if order < 1:
            raise ValueError("order must be >= 1")
        region = sorted(set(region))
        if not region:
            return 0.0
        lam = np.linalg.eigvalsh(self.reduced_density(region))
        lam = lam[lam > 1e-12]
        lam = lam / lam.sum()
        if order == 1:
            return float(-(lam * np.log2(lam)).sum())
        return float(np.log2((lam**order).sum()) / (1 - order))

    def expectation_pauli(self, obs: PauliString) -> float:
        if self.d != 2 or obs.n != self.n:
            raise ValueError("observable mismatch")
        return float(np.real(self.amps.conj() @ (obs.to_matrix() @ self.amps)))


def clifford_unitary(gate: CliffordGate) -> np.ndarray:
    """Dense matrix of a Clifford gate, unique up to global phase.

    Column b is image(X^b) applied to the stabilizer state fixed by the
    images of the Z generators.
    """
    a = gate.arity
    dim = 2**a
    images = gate.images()
    x_imgs = [images[2 * q].to_matrix() for q in range(a)]
    z_imgs = [images[2 * q + 1].to_matrix() for q in range(a)]
    v = np.ones(dim, dtype=complex)
    for zm in z_imgs:
        v = (v + zm @ v) / 2.0
    nrm = np.linalg.norm(v)
    if nrm < 1e-12:  # projector annihilated the symmetric vector; reseed
        probe = np.zeros(dim, dtype=complex)
        for k in range(dim):
            probe[:] = 0
            probe[k] = 1.0
            w = probe
            for zm in z_imgs:
                w = (w + zm @ w) / 2.0
            if np.linalg.norm(w) > 1e-12:
                v = w
                nrm = np.linalg.norm(w)
                break
    v = v / nrm
    cols = np.zeros((dim, dim), dtype=complex)
    for b in range(dim):
        w = v
        for q in range(a):
            if (b >> (a - 1 - q)) & 1:
                w = x_imgs[q] @ w
        cols[:, b] = w
    return cols


def stabilizer_density_matrix(state: StabilizerState) -> np.ndarray:
    """Dense density matrix of a (possibly mixed) stabilizer state."""
    if state.n > 12:
        raise ValueError("dense conversion limited to n <= 12")
    dim = 2**state.n
    rho = np.eye(dim, dtype=complex)
    for g in state.generators():
        rho = rho @ (np.eye(dim) + g.to_matrix()) / 2.0
    return rho / np.trace(rho)


def partial_trace(rho: np.ndarray, region, n_sites: int) -> np.ndarray:
    """Reduced density matrix on the region (qubit sites)."""
    region = sorted(set(region))
    t = rho.reshape([2] * (2 * n_sites))
    row = [chr(ord("a") + s) for s in range(n_sites)]
    col = [chr(ord("A") + s) if s in region else row[s] for s in range(n_sites)]
    out = [row[s] for s in region] + [col[s] for s in region]
    spec = "".join(row) + "".join(col) + "->" + "".join(out)
    k = len(region)
    return np.einsum(spec, t).reshape(2**k, 2**k)


def renyi_from_density(rho: np.ndarray, region, n_sites: int, order: float = 1.0) -> float:
    """Renyi entropy of a region of a density matrix, in bits."""
    region = sorted(set(region))
    if not region:
        return 0.0
    lam = np.linalg.eigvalsh(partial_trace(rho, region, n_sites))
    lam = lam[lam > 1e-12]
    lam = lam / lam.sum()
    if order == 1:
        return float(-(lam * np.log2(lam)).sum())
    return float(np.log2((lam**order).sum()) / (1 - order))
