"""Measurement-diluted brickwork lattices and minimal-cut entanglement.

Infinite-d limit: each measured leg cuts the circuit, the domain wall from
a top-boundary cut position follows the cheapest path to the bottom or
either side, and crossing an unmeasured leg costs one unit of log d.

Geometry: gate layer t (1..T) acts on bonds (x, x+1) with x = (t-1) mod 2,
open sides; leg (t, x) is the wire above layer t at site x, giving L*T
legs.  Dual nodes (t, g) sit in the gaps g = 0..L between legs of row t;
horizontal moves cross legs (unit cost unless measured), vertical moves
thread between gates (free when no gate blocks), the sides and the
pre-circuit product state terminate cuts for free.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log2
from typing import Optional, Sequence

import numpy as np
from numba import njit

from .rng import stream

__all__ = [
    "DilutedLattice",
    "sample_lattice",
    "minimal_cut",
    "interval_cut",
    "brute_force_min_cut",
    "brute_force_interval_cut",
    "entropy_estimate",
    "spans_vertically",
    "phase_scan",
    "critical_slope",
    "estimate_nu",
]


@dataclass
class DilutedLattice:
    """Brickwork lattice with each leg independently measured (prob p)."""

    L: int
    T: int
    measured: np.ndarray  # (T, L) uint8, measured[t-1, x] for leg (t, x)
    p: float = float("nan")
    seed: Optional[tuple] = None

    def __post_init__(self):
        if self.L % 2 or self.L < 2:
            raise ValueError("L must be even and >= 2")
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if self.measured.shape != (self.T, self.L):
            raise ValueError("measured mask has wrong shape")

    @property
    def n_links(self) -> int:
        return self.L * self.T


def sample_lattice(L: int, T: int, p: float, seed, index: int = 0) -> DilutedLattice:
    """i.i.d. dilution: each leg is measured with probability p."""
    if isinstance(seed, np.random.Generator):
        rng, origin = seed, None
    else:
        rng, origin = stream(seed, index), (seed, index)
    measured = (rng.random((T, L)) < p).astype(np.uint8)
    return DilutedLattice(L, T, measured, p=p, seed=origin)


@njit(cache=True)
def _dists_kernel(measured, L, T, src_gap):
    """0/1 deque BFS over the dual graph from a top gap.

    Node ids: (t-1)*(L+1) + g for t = 1..T; the last id is a free super
    node representing the side and bottom boundaries, where the domain wall
    may exit, slide at zero cost, and re-enter.
    """
    width = L + 1
    n = T * width + 1
    sup = n - 1
    inf = np.int32(1 << 30)
    dist = np.full(n, inf, dtype=np.int32)
    cap = 6 * n + 8
    dq = np.empty(cap, dtype=np.int32)
    head = np.int64(0)
    tail = np.int64(0)
    start = (T - 1) * width + src_gap
    dist[start] = 0
    dq[tail % cap] = start
    tail += 1
    while head < tail:
        u = dq[head % cap]
        head += 1
        du = dist[u]
        if u == sup:
            for t in range(1, T + 1):
                for g in (0, L):
                    v = (t - 1) * width + g
                    if du < dist[v]:
                        dist[v] = du
                        head -= 1
                        dq[head % cap] = v
            for g in range(0, L + 1, 2):  # open layer-1 channels (even g)
                if du < dist[g]:
                    dist[g] = du
                    head -= 1
                    dq[head % cap] = g
            continue
        t = u // width + 1  # leg row 1..T
        g = u - (t - 1) * width
        if g == 0 or g == L or (t == 1 and g % 2 == 0):
            # side exit, or the open channel through gate layer 1 with the
            # free product-state wires below
            if du < dist[sup]:
                dist[sup] = du
                head -= 1
                dq[head % cap] = sup
        # horizontal: cross leg (t, g) to the right, (t, g-1) to the left
        for step in (1, -1):
            leg = g if step == 1 else g - 1
            if leg < 0 or leg >= L:
                continue
            c = np.int32(0) if measured[t - 1, leg] else np.int32(1)
            v = u + step
            nd = du + c
            if nd < dist[v]:
                dist[v] = nd
                if c == 0:
                    head -= 1
                    dq[head % cap] = v
                else:
                    dq[tail % cap] = v
                    tail += 1
        # vertical: down through gate layer t, up through gate layer t+1
        if t > 1:
            par = (t - 1) % 2
            if not (1 <= g <= L - 1 and ((g - 1) % 2) == par):
                v = u - width
                if du < dist[v]:
                    dist[v] = du
                    head -= 1
                    dq[head % cap] = v
        if t < T:
            par = t % 2
            if not (1 <= g <= L - 1 and ((g - 1) % 2) == par):
                v = u + width
                if du < dist[v]:
                    dist[v] = du
                    head -= 1
                    dq[head % cap] = v
    return dist


def _half_cut_kernel(measured, L, T, cut_gap):
    dist = _dists_kernel(measured, L, T, cut_gap)
    return int(dist[T * (L + 1)])


def minimal_cut(lattice: DilutedLattice, cut_gap: int) -> int:
    """Minimum number of unmeasured legs a cut from the top gap must cross.

    cut_gap = number of sites left of the cut (the bond between sites
    cut_gap-1 and cut_gap); 0/1-weighted deque BFS on the dual graph.
    Cost-equal paths are interchangeable; only the cost is returned.
    """
    L, T = lattice.L, lattice.T
    if not 0 <= cut_gap <= L:
        raise ValueError("cut position out of range")
    if cut_gap in (0, L):
        return 0
    return _half_cut_kernel(lattice.measured, L, T, cut_gap)


def interval_cut(lattice: DilutedLattice, g_left: int, g_right: int) -> int:
    """Domain-wall cost for an interval region [g_left, g_right).

    The wall joins the interval's two top endpoints, either through the
    bulk or via the free side/bottom boundaries; this two-endpoint cost is
    the one whose critical log-coefficient Eq-42-style formulas quote (a
    single half-cut endpoint carries half of it).
    """
    L, T = lattice.L, lattice.T
    if not 0 <= g_left < g_right <= L:
        raise ValueError("bad interval gaps")
    if g_left == 0 and g_right == L:
        return 0
    if g_left == 0:
        return minimal_cut(lattice, g_right)
    if g_right == L:
        return minimal_cut(lattice, g_left)
    dist = _dists_kernel(lattice.measured, L, T, g_left)
    return int(dist[(T - 1) * (L + 1) + g_right])


def _neighbors_py(lattice: DilutedLattice, t: int, g: int):
    """Independent re-derivation of the dual moves for the oracle."""
    L, T = lattice.L, lattice.T
    out = []
    if g + 1 <= L:
        out.append((t, g + 1, 0 if lattice.measured[t - 1, g] else 1))
    if g - 1 >= 0:
        out.append((t, g - 1, 0 if lattice.measured[t - 1, g - 1] else 1))
    if t - 1 >= 1:
        par = (t - 1) % 2
        if not (1 <= g <= L - 1 and (g - 1) % 2 == par):
            out.append((t - 1, g, 0))
    if t + 1 <= T:
        par = t % 2
        if not (1 <= g <= L - 1 and (g - 1) % 2 == par):
            out.append((t + 1, g, 0))
    return out


def brute_force_min_cut(lattice: DilutedLattice, cut_gap: int) -> int:
    """Exhaustive enumeration over simple dual paths (tiny lattices only).

    Depth-first search trying every monotone and non-monotone path from the
    top entry point to any free boundary; branch-and-bound pruning only
    discards prefixes already no better than a completed path.
    """
    L, T = lattice.L, lattice.T
    if lattice.n_links > 40:
        raise ValueError("oracle limited to <= 40 links")
    if cut_gap in (0, L):
        return 0
    best = [lattice.n_links + 1]
    seen = set()

    def terminal(t, g):
        return g == 0 or g == L or (t == 1 and g % 2 == 0)

    def dfs(t, g, cost):
        if cost >= best[0]:
            return
        if terminal(t, g):
            best[0] = cost
            return
        for (t2, g2, c) in _neighbors_py(lattice, t, g):
            if (t2, g2) in seen:
                continue
            seen.add((t2, g2))
            dfs(t2, g2, cost + c)
            seen.remove((t2, g2))

    seen.add((T, cut_gap))
    dfs(T, cut_gap, 0)
    return best[0]


def brute_force_interval_cut(lattice: DilutedLattice, g_left: int, g_right: int) -> int:
    """Path-enumeration oracle for the two-endpoint interval cut.

    The free boundary is modeled as one extra vertex ('sup') that any
    side gap or open bottom channel connects to at zero cost.
    """
    L, T = lattice.L, lattice.T
    if lattice.n_links > 40:
        raise ValueError("oracle limited to <= 40 links")
    target = (T, g_right)
    best = [lattice.n_links + 1]
    seen = set()

    def exits_free(t, g):
        return g == 0 or g == L or (t == 1 and g % 2 == 0)

    def neighbors(node):
        if node == "sup":
            out = []
            for t in range(1, T + 1):
                for g in (0, L):
                    out.append(((t, g), 0))
            for g in range(0, L + 1, 2):
                out.append(((1, g), 0))
            return out
        t, g = node
        out = [((t2, g2), c) for (t2, g2, c) in _neighbors_py(lattice, t, g)]
        if exits_free(t, g):
            out.append(("sup", 0))
        return out

    def dfs(node, cost):
        if cost >= best[0]:
            return
        if node == target:
            best[0] = cost
            return
        for nxt, c in neighbors(node):
            if nxt in seen:
                continue
            seen.add(nxt)
            dfs(nxt, cost + c)
            seen.remove(nxt)

    start = (T, g_left)
    seen.add(start)
    dfs(start, 0)
    return best[0]


def entropy_estimate(lattice: DilutedLattice, cut_gap: int, d: int) -> float:
    """Minimal-cut entanglement in bits: l_DW * log2(d), any Renyi index."""
    if d < 2:
        raise ValueError("local dimension must be >= 2")
    return minimal_cut(lattice, cut_gap) * log2(d)


@njit(cache=True, inline="always")
def _uf_find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def _spanning_kernel(measured, L, T):
    """Does a cluster of unmeasured legs connect leg row 1 to leg row T?

    Unmeasured legs join through the gate they share; at odd layers the
    boundary sites are idle and the wire connects rows directly.
    """
    n = T * L
    parent = np.empty(n, dtype=np.int32)
    for i in range(n):
        parent[i] = i
    ids = np.empty(4, dtype=np.int32)
    for t in range(1, T + 1):  # gate layer t joins leg rows t-1 and t
        par = (t - 1) % 2
        for x0 in range(par, L - 1, 2):
            cnt = 0
            if t - 1 >= 1:
                if not measured[t - 2, x0]:
                    ids[cnt] = (t - 2) * L + x0
                    cnt += 1
                if not measured[t - 2, x0 + 1]:
                    ids[cnt] = (t - 2) * L + x0 + 1
                    cnt += 1
            if not measured[t - 1, x0]:
                ids[cnt] = (t - 1) * L + x0
                cnt += 1
            if not measured[t - 1, x0 + 1]:
                ids[cnt] = (t - 1) * L + x0 + 1
                cnt += 1
            for k in range(1, cnt):
                ra = _uf_find(parent, ids[0])
                rb = _uf_find(parent, ids[k])
                if ra != rb:
                    parent[ra] = rb
        if par == 1 and t - 1 >= 1:  # idle boundary sites pass straight through
            for x in (0, L - 1):
                if not measured[t - 2, x] and not measured[t - 1, x]:
                    ra = _uf_find(parent, (t - 2) * L + x)
                    rb = _uf_find(parent, (t - 1) * L + x)
                    if ra != rb:
                        parent[ra] = rb
    mark = np.zeros(n, dtype=np.uint8)
    for x in range(L):
        if not measured[0, x]:
            mark[_uf_find(parent, x)] = 1
    for x in range(L):
        if not measured[T - 1, x]:
            if mark[_uf_find(parent, (T - 1) * L + x)]:
                return True
    return False


def spans_vertically(lattice: DilutedLattice) -> bool:
    """Spanning indicator used as the dimensionless crossing observable."""
    return bool(_spanning_kernel(lattice.measured, lattice.L, lattice.T))


def phase_scan(
    L_list: Sequence[int],
    p_grid: Sequence[float],
    n_samples: int,
    seed: int = 0,
    T_factor: int = 2,
    d: int = 2,
) -> list[dict]:
    """Monte Carlo scan: for each (L, p), the half-cut mean l_DW and the
    unmeasured-cluster spanning probability, with standard errors."""
    if len(L_list) == 0 or len(p_grid) == 0:
        raise ValueError("empty scan grids")
    rows = []
    for li, L in enumerate(L_list):
        T = T_factor * L
        cut = L // 2
        for pi, p in enumerate(p_grid):
            rng = stream(seed, li * 10_000 + pi)
            cuts = np.empty(n_samples)
            spans = np.empty(n_samples)
            for s in range(n_samples):
                lat = sample_lattice(L, T, p, rng)
                cuts[s] = _half_cut_kernel(lat.measured, L, T, cut)
                spans[s] = _spanning_kernel(lat.measured, L, T)
            rows.append(
                {
                    "L": L,
                    "T": T,
                    "p": float(p),
                    "cut_gap": cut,
                    "mean_lDW": float(cuts.mean()),
                    "sem_lDW": float(cuts.std(ddof=1) / np.sqrt(n_samples)),
                    "spanning_prob": float(spans.mean()),
                    "spanning_sem": float(
                        max(spans.std(ddof=1), 1e-3) / np.sqrt(n_samples)
                    ),
                    "mean_entropy_bits": float(cuts.mean() * log2(d)),
                    "n_samples": n_samples,
                    "seed": seed,
                }
            )
    return rows


def critical_slope(
    region_sizes: Sequence[int],
    n_samples: int,
    seed: int = 0,
    p: float = 0.5,
    L: Optional[int] = None,
) -> tuple[float, float]:
    """Log-coefficient of the critical interval entropy.

    Measures E[l_DW] for interval regions of the given sizes (all sharing
    their left endpoint in the bulk of one wide lattice) and fits a line
    in ln(region size); the two-endpoint domain-wall coefficient is the
    √3/π one, after converting entropies back from bits to nats (the
    coefficient multiplies ln d, so l_DW itself carries no unit factor).
    """
    region_sizes = sorted(region_sizes)
    if L is None:
        L = max(4 * max(region_sizes), 512)
    if L % 2:
        L += 1
    T = L
    g_left = L // 2 - max(region_sizes) // 2
    rng = stream(seed, 777_000)
    width = L + 1
    sums = np.zeros(len(region_sizes))
    sqs = np.zeros(len(region_sizes))
    for s in range(n_samples):
        lat = sample_lattice(L, T, p, rng)
        dist = _dists_kernel(lat.measured, L, T, g_left)
        for k, la in enumerate(region_sizes):
            v = dist[(T - 1) * width + g_left + la]
            sums[k] += v
            sqs[k] += v * v
    means = sums / n_samples
    sems = np.sqrt(np.maximum(sqs / n_samples - means**2, 1e-12) / n_samples)
    x = np.log(np.asarray(region_sizes, dtype=float))
    w = 1.0 / sems**2
    xm = (w * x).sum() / w.sum()
    ym = (w * means).sum() / w.sum()
    slope = (w * (x - xm) * (means - ym)).sum() / (w * (x - xm) ** 2).sum()
    stderr = float(np.sqrt(1.0 / (w * (x - xm) ** 2).sum()))
    return float(slope), stderr


def estimate_nu(scan_rows: Sequence[dict], observable: str = "spanning_prob"):
    """Finite-size-scaling collapse of the scan table; returns the fit.

    Needs at least 3 sizes and 7 p-values bracketing the crossing;
    delegated to the shared collapse engine.
    """
    from .collapse import collapse_fit

    sizes = sorted({r["L"] for r in scan_rows})
    ps = sorted({r["p"] for r in scan_rows})
    if len(sizes) < 3:
        raise ValueError("need at least 3 system sizes for a collapse")
    if len(ps) < 7:
        raise ValueError("need at least 7 p-values for a collapse")
    curves = {}
    sem_key = {"spanning_prob": "spanning_sem", "mean_lDW": "sem_lDW"}[observable]
    for L in sizes:
        sub = sorted((r for r in scan_rows if r["L"] == L), key=lambda r: r["p"])
        curves[L] = (
            np.array([r["p"] for r in sub]),
            np.array([r[observable] for r in sub]),
            np.array([r[sem_key] for r in sub]),
        )
    return collapse_fit(curves)
