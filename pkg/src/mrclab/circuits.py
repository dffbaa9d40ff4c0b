"""Monitored random circuit ensembles over the stabilizer or dense engine.

Protocol (documented because the crossing location depends on it): brickwork
on a ring, one half-layer = one row of disjoint two-qubit Cliffords on
alternating bonds, and after every half-layer each qubit is measured in Z
independently with probability p.  Time t counts half-layers; observables
are recorded after each measurement round, so series have length depth+1
including t=0.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .clifford import (
    TWO_QUBIT_SIGN_CHOICES,
    TWO_QUBIT_SYMPLECTIC_COUNT,
    CliffordGate,
    named_gate,
)
from .dense import DenseState, clifford_unitary
from .pauli import PauliString
from .rng import stream
from .stabilizer import StabilizerState

__all__ = [
    "CircuitConfig",
    "TrajectoryResult",
    "EnsembleStats",
    "run_trajectory",
    "run_ensemble",
    "ancilla_probe",
    "purification_run",
    "tripartite_mutual_information",
    "spin_glass_order",
    "crossing_points",
    "default_workers",
]


def default_workers() -> int:
    env = os.environ.get("MRCLAB_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class CircuitConfig:
    """Ensemble specification for one monitored-circuit family."""

    L: int
    depth: int
    p: float
    layout: str = "brickwork"      # brickwork | random-pair
    engine: str = "stabilizer"     # stabilizer | dense
    initial: str = "product-zero"  # product-zero | maximally-mixed | custom
    ancilla: str = "none"          # none | scrambled-reference
    boundary: str = "periodic"     # periodic | open
    master_seed: int = 0
    n_trajectories: int = 1
    scramble_depth: Optional[int] = None  # ancilla pre-scrambling, default 2L

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("L must be >= 2")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.layout not in ("brickwork", "random-pair"):
            raise ValueError(f"unknown layout {self.layout!r}")
        if self.engine not in ("stabilizer", "dense"):
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.boundary not in ("periodic", "open"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.layout == "brickwork" and self.boundary == "periodic" and self.L % 2:
            raise ValueError("periodic brickwork needs even L")
        if self.ancilla not in ("none", "scrambled-reference"):
            raise ValueError(f"unknown ancilla mode {self.ancilla!r}")
        if self.ancilla != "none" and self.initial != "product-zero":
            raise ValueError("ancilla protocol starts from the product state")


@dataclass
class TrajectoryResult:
    """Per-trajectory record; series arrays all have length depth + 1."""

    index: int
    series: dict
    measurements: list  # (t, site, outcome) triples
    seed: tuple


@dataclass
class EnsembleStats:
    """Trajectory mean and standard error per recorded time."""

    n: int
    mean: dict
    sem: dict

    @classmethod
    def from_series(cls, series_list: Sequence[dict]) -> "EnsembleStats":
        n = len(series_list)
        mean, sem = {}, {}
        for key in series_list[0]:
            stack = np.stack([s[key] for s in series_list]).astype(float)
            mean[key] = np.nanmean(stack, axis=0)
            std = np.nanstd(stack, axis=0, ddof=1) if n > 1 else np.zeros_like(stack[0])
            counts = np.sum(~np.isnan(stack), axis=0)
            sem[key] = np.where(counts > 0, std / np.sqrt(np.maximum(counts, 1)), np.nan)
        return cls(n=n, mean=mean, sem=sem)


def brickwork_bonds(L: int, parity: int, boundary: str) -> np.ndarray:
    """Disjoint bonds (i, i+1) of the given parity row."""
    if boundary == "periodic":
        starts = range(parity, L, 2)
        return np.array([(i, (i + 1) % L) for i in starts], dtype=np.int64)
    starts = range(parity, L - 1, 2)
    return np.array([(i, i + 1) for i in starts], dtype=np.int64)


class _StabilizerEngine:
    def __init__(self, n: int, initial: str):
        if initial == "product-zero":
            self.state = StabilizerState.zero_state(n)
        elif initial == "maximally-mixed":
            self.state = StabilizerState.maximally_mixed(n)
        else:
            raise ValueError(f"unknown initial state {initial!r}")

    def apply_layer(self, bonds, sym, smask):
        self.state.apply_gate_layer(bonds, sym, smask)

    def apply_named(self, name, sites):
        self.state.apply_gate(named_gate(name), sites)

    def measure_z(self, site, rng):
        return self.state.measure_z(site, rng)

    def region_entropy(self, region):
        return float(self.state.region_entropy(region))

    @property
    def total_entropy(self):
        return float(self.state.total_entropy)

    def expectation_z(self, site):
        return float(
            self.state.expectation_pauli(PauliString.single(self.state.n, site, "Z"))
        )


class _DenseEngine:
    _gate_cache: dict = {}

    def __init__(self, n: int, initial: str):
        if initial != "product-zero":
            raise ValueError("dense engine supports pure product inputs only")
        self.state = DenseState.zero_state(n)

    def apply_layer(self, bonds, sym, smask):
        for (a, b), s, m in zip(bonds, sym, smask):
            key = (int(s), int(m))
            u = self._gate_cache.get(key)
            if u is None:
                u = clifford_unitary(CliffordGate(2, *key))
                self._gate_cache[key] = u
            self.state.apply_unitary(u, [int(a), int(b)])

    def apply_named(self, name, sites):
        self.state.apply_clifford(named_gate(name), sites)

    def measure_z(self, site, rng):
        return self.state.measure_z(site, rng)

    def region_entropy(self, region):
        return self.state.renyi_entropy(region, 1)

    @property
    def total_entropy(self):
        return 0.0

    def expectation_z(self, site):
        return self.state.expectation_pauli(
            PauliString.single(self.state.n, site, "Z")
        )


def _make_engine(config: CircuitConfig, n: int):
    if config.engine == "stabilizer":
        return _StabilizerEngine(n, config.initial)
    return _DenseEngine(n, config.initial)


def _sample_layer(rng, nb):
    sym = rng.integers(0, TWO_QUBIT_SYMPLECTIC_COUNT, size=nb)
    smask = rng.integers(0, TWO_QUBIT_SIGN_CHOICES, size=nb)
    return sym, smask


def _quarters(L: int):
    q = L // 4
    return (range(0, q), range(q, 2 * q), range(2 * q, 3 * q))


def tripartite_mutual_information(state: StabilizerState, regions=None) -> float:
    """I3 = S_A + S_B + S_C - S_AB - S_BC - S_AC + S_ABC for quarters A,B,C.

    Negative and extensive in the volume-law phase, ~0 in the area-law
    phase; a size-independent crossing marks the transition.
    """
    if regions is None:
        regions = _quarters(state.n)
    a, b, c = (list(r) for r in regions)
    s = state.region_entropy
    return float(
        s(a) + s(b) + s(c) - s(a + b) - s(b + c) - s(a + c) + s(a + b + c)
    )


def run_trajectory(
    config: CircuitConfig,
    index: int,
    observables: Sequence[str] = ("half_cut",),
    sparse_times: Optional[np.ndarray] = None,
    keep_measurements: bool = True,
    initial_state_factory: Optional[Callable[[], StabilizerState]] = None,
) -> TrajectoryResult:
    """Run one quantum trajectory and record the requested observables.

    observables may contain: half_cut, total, ancilla, i3, zmean, profile.
    i3/zmean/profile are recorded only at `sparse_times` (every step if
    None, which can be slow).  Born-rule weighting of the record is
    automatic because outcomes are sampled.
    """
    rng = stream(config.master_seed, index)
    L, T = config.L, config.depth
    has_ancilla = config.ancilla == "scrambled-reference"
    n = L + 1 if has_ancilla else L

    if config.engine == "dense" and 2**n > (1 << 26):
        raise ValueError("dense engine exceeds the oracle size guard")
    if config.initial == "custom":
        if initial_state_factory is None:
            raise ValueError("custom initial state needs a factory")
        eng = _StabilizerEngine.__new__(_StabilizerEngine)
        eng.state = initial_state_factory()
    else:
        eng = _make_engine(config, n)

    if has_ancilla:
        # reference qubit n-1 maximally entangled with qubit 0, then the
        # system is scrambled by a measurement-free brickwork circuit
        eng.apply_named("H", [n - 1])
        eng.apply_named("CNOT", [n - 1, 0])
        scramble = config.scramble_depth
        if scramble is None:
            scramble = 2 * L
        for t in range(scramble):
            bonds = brickwork_bonds(L, t % 2, config.boundary)
            sym, smask = _sample_layer(rng, bonds.shape[0])
            eng.apply_layer(bonds, sym, smask)

    want = set(observables)
    series: dict[str, np.ndarray] = {}
    for key in ("half_cut", "total", "ancilla", "i3"):
        if key in want:
            series[key] = np.full(T + 1, np.nan)
    if "zmean" in want:
        series["zmean"] = np.full((T + 1, L), np.nan)
    if "profile" in want:
        series["profile"] = np.full((T + 1, L + 1), np.nan)

    sparse = None if sparse_times is None else set(int(t) for t in sparse_times)
    half = list(range(L // 2))

    def record(t):
        if "half_cut" in want:
            series["half_cut"][t] = eng.region_entropy(half)
        if "total" in want:
            series["total"][t] = eng.total_entropy
        if "ancilla" in want:
            series["ancilla"][t] = eng.region_entropy([n - 1])
        if sparse is not None and t not in sparse:
            return
        if "i3" in want:
            if isinstance(eng, _StabilizerEngine):
                series["i3"][t] = tripartite_mutual_information(eng.state, _quarters(L))
            else:
                a, b, c = (list(r) for r in _quarters(L))
                s = eng.region_entropy
                series["i3"][t] = (
                    s(a) + s(b) + s(c) - s(a + b) - s(b + c) - s(a + c) + s(a + b + c)
                )
        if "zmean" in want:
            series["zmean"][t] = [eng.expectation_z(i) for i in range(L)]
        if "profile" in want:
            series["profile"][t] = [eng.region_entropy(range(x)) for x in range(L + 1)]

    measurements: list[tuple[int, int, int]] = []
    record(0)
    for t in range(1, T + 1):
        if config.layout == "brickwork":
            bonds = brickwork_bonds(L, (t - 1) % 2, config.boundary)
            sym, smask = _sample_layer(rng, bonds.shape[0])
            eng.apply_layer(bonds, sym, smask)
        else:  # random-pair: L/2 sequentially placed random bonds per step
            n_bonds = max(L - 1, 1)
            for _ in range(L // 2):
                if config.boundary == "periodic":
                    i = int(rng.integers(0, L))
                    bond = np.array([[i, (i + 1) % L]], dtype=np.int64)
                else:
                    i = int(rng.integers(0, n_bonds))
                    bond = np.array([[i, i + 1]], dtype=np.int64)
                sym, smask = _sample_layer(rng, 1)
                eng.apply_layer(bond, sym, smask)
        if config.p > 0:
            mask = rng.random(L) < config.p
            for site in np.nonzero(mask)[0]:
                outcome, _ = eng.measure_z(int(site), rng)
                if keep_measurements:
                    measurements.append((t, int(site), int(outcome)))
        record(t)

    return TrajectoryResult(
        index=index,
        series=series,
        measurements=measurements,
        seed=(config.master_seed, index),
    )


def _run_block(args):
    config, lo, hi, observables, sparse_times = args
    out = []
    for idx in range(lo, hi):
        res = run_trajectory(
            config, idx, observables, sparse_times, keep_measurements=False
        )
        out.append(res.series)
    return lo, out


def run_ensemble(
    config: CircuitConfig,
    observables: Sequence[str] = ("half_cut",),
    sparse_times: Optional[np.ndarray] = None,
    workers: Optional[int] = None,
) -> tuple[EnsembleStats, list]:
    """Run config.n_trajectories independent trajectories.

    Work is split into contiguous index blocks per worker; per-trajectory
    streams make the merged result identical for any worker count.
    Returns (EnsembleStats, list-of-series ordered by trajectory index).
    """
    workers = workers or default_workers()
    n = config.n_trajectories
    tasks = []
    if workers <= 1 or n < 4:
        _, out = _run_block((config, 0, n, tuple(observables), sparse_times))
        ordered = out
    else:
        block = (n + workers - 1) // workers
        for w in range(workers):
            lo, hi = w * block, min((w + 1) * block, n)
            if lo < hi:
                tasks.append((config, lo, hi, tuple(observables), sparse_times))
        ordered = [None] * n
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for lo, out in pool.map(_run_block, tasks):
                for k, series in enumerate(out):
                    ordered[lo + k] = series
    return EnsembleStats.from_series(ordered), ordered


def ancilla_probe(
    config: CircuitConfig,
    workers: Optional[int] = None,
    window: Optional[tuple[int, int]] = None,
):
    """Trajectory-averaged reference-qubit entropy S_R.

    Returns (stats, window_mean, window_sem): the order parameter is the
    time average of E[S_R] over the steady window, default [2L, 4L].
    """
    if config.ancilla != "scrambled-reference":
        config = replace(config, ancilla="scrambled-reference")
    stats, ordered = run_ensemble(config, ("ancilla",), workers=workers)
    t0, t1 = window or (2 * config.L, min(4 * config.L, config.depth))
    per_traj = np.array(
        [np.nanmean(s["ancilla"][t0 : t1 + 1]) for s in ordered]
    )
    wmean = float(per_traj.mean())
    wsem = float(per_traj.std(ddof=1) / np.sqrt(len(per_traj))) if len(per_traj) > 1 else 0.0
    return stats, wmean, wsem


def purification_run(
    config: CircuitConfig, workers: Optional[int] = None
) -> EnsembleStats:
    """Mean total entropy S(t) of an initially maximally mixed state."""
    if config.initial != "maximally-mixed":
        config = replace(config, initial="maximally-mixed")
    if config.engine != "stabilizer":
        raise ValueError("purification runs need the stabilizer engine")
    stats, _ = run_ensemble(config, ("total",), workers=workers)
    return stats


def _separated_pairs(L: int) -> list[tuple[int, int]]:
    pairs = []
    step = max(L // 8, 1)
    for gap in {L // 4, 3 * L // 8, L // 2}:
        for i in range(0, L - gap, step):
            pairs.append((i, i + gap))
    return pairs


def _spin_glass_one(args) -> float:
    L, zz_prob, sweeps, master_seed, idx = args
    rng = stream(master_seed, idx)
    st = StabilizerState.zero_state(L)
    for _ in range(sweeps * L):
        if rng.random() < zz_prob:
            b = int(rng.integers(0, L - 1))
            st.measure_zz(b, b + 1, rng)
        else:
            st.measure_x(int(rng.integers(0, L)), rng)
    vals = []
    for i, j in _separated_pairs(L):
        obs = PauliString.identity(L)
        obs.z[i] = obs.z[j] = 1
        vals.append(st.expectation_pauli(obs) ** 2)
    return float(np.mean(vals))


def spin_glass_order(
    L: int,
    zz_prob: float,
    sweeps: int,
    n_trajectories: int,
    master_seed: int = 0,
    workers: Optional[int] = None,
) -> tuple[float, float]:
    """Edwards-Anderson order chi2 = E|<Z_i Z_j>|^2 in measurement-only
    dynamics: each elementary step measures Z_i Z_{i+1} with probability
    zz_prob, else X_i.  One sweep = L steps; chi2 is evaluated at the final
    time over well-separated pairs |i-j| in [L/4, L/2].
    """
    workers = workers or default_workers()
    tasks = [(L, zz_prob, sweeps, master_seed, i) for i in range(n_trajectories)]
    if workers <= 1 or n_trajectories < 4:
        vals = [_spin_glass_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            vals = list(pool.map(_spin_glass_one, tasks, chunksize=8))
    vals = np.array(vals)
    sem = vals.std(ddof=1) / np.sqrt(len(vals)) if len(vals) > 1 else 0.0
    return float(vals.mean()), float(sem)


def crossing_points(levels: dict, p_grid: np.ndarray) -> list[float]:
    """Pairwise crossing locations of observable-vs-p curves keyed by L.

    Curves are linearly interpolated; one crossing per consecutive size
    pair is returned (the sign change of their difference).
    """
    sizes = sorted(levels)
    out = []
    for a, b in zip(sizes, sizes[1:]):
        diff = np.asarray(levels[a]) - np.asarray(levels[b])
        hit = None
        for k in range(len(p_grid) - 1):
            if diff[k] == 0:
                hit = float(p_grid[k])
                break
            if diff[k] * diff[k + 1] < 0:
                frac = diff[k] / (diff[k] - diff[k + 1])
                hit = float(p_grid[k] + frac * (p_grid[k + 1] - p_grid[k]))
                break
        if hit is not None:
            out.append(hit)
    return out
