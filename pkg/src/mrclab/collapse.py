"""Finite-size-scaling collapse: fit (p_c, nu) so curves for different L
fall on one master curve in the scaled variable x = (p - p_c) L^{1/nu}.

The objective is the standard master-curve residual: every point is
compared against the linear interpolation of the bracketing points from
the *other* system sizes, normalized by both error bars.  Minimized by a
coarse grid followed by golden-section refinement, with parametric
bootstrap intervals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .rng import stream

__all__ = ["CollapseResult", "collapse_fit", "synthetic_scaling_data"]

GOLDEN = (np.sqrt(5) - 1) / 2


@dataclass
class CollapseResult:
    p_c: float
    nu: float
    objective: float
    p_c_interval: tuple
    nu_interval: tuple
    z: Optional[float] = None
    meta: dict = field(default_factory=dict)


def _objective(curves_sorted, p_c: float, nu: float) -> float:
    xs, ys, es, ls = [], [], [], []
    for size, (p, y, sem) in curves_sorted:
        xs.append((p - p_c) * size ** (1.0 / nu))
        ys.append(y)
        es.append(sem)
        ls.append(np.full(len(p), size))
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    e = np.concatenate(es)
    l = np.concatenate(ls)
    order = np.argsort(x, kind="stable")
    x, y, e, l = x[order], y[order], e[order], l[order]
    n = len(x)
    total = 0.0
    scored = 0
    for i in range(n):
        x_lo = y_lo = e_lo = None
        x_hi = y_hi = e_hi = None
        for j in range(i - 1, -1, -1):
            if l[j] != l[i]:
                x_lo, y_lo, e_lo = x[j], y[j], e[j]
                break
        for j in range(i + 1, n):
            if l[j] != l[i]:
                x_hi, y_hi, e_hi = x[j], y[j], e[j]
                break
        if x_lo is None or x_hi is None or x_hi <= x_lo:
            continue
        w = (x[i] - x_lo) / (x_hi - x_lo)
        yhat = (1 - w) * y_lo + w * y_hi
        var = ((1 - w) * e_lo) ** 2 + (w * e_hi) ** 2 + e[i] ** 2
        if var <= 0:
            var = 1e-12
        total += (y[i] - yhat) ** 2 / var
        scored += 1
    if scored == 0:
        return float("inf")
    return total / scored


def _golden_refine(fun, lo, hi, iters=24):
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fun(d)
    return (a + b) / 2


def _fit_once(curves_sorted, p_c_grid, nu_grid, refine=True):
    best = (float("inf"), None, None)
    for pc in p_c_grid:
        for nu in nu_grid:
            s = _objective(curves_sorted, pc, nu)
            if s < best[0]:
                best = (s, pc, nu)
    _, pc, nu = best
    if pc is None:
        raise ValueError("degenerate curves: objective never finite")
    if refine:
        dp = (p_c_grid[-1] - p_c_grid[0]) / max(len(p_c_grid) - 1, 1)
        dn = (nu_grid[-1] - nu_grid[0]) / max(len(nu_grid) - 1, 1)
        for _ in range(3):
            pc = _golden_refine(
                lambda v: _objective(curves_sorted, v, nu), pc - dp, pc + dp
            )
            nu = _golden_refine(
                lambda v: _objective(curves_sorted, pc, v),
                max(nu - dn, 0.05),
                nu + dn,
            )
    return pc, nu, _objective(curves_sorted, pc, nu)


def collapse_fit(
    curves: dict,
    p_c_grid=None,
    nu_grid=None,
    n_bootstrap: int = 48,
    seed: int = 0,
) -> CollapseResult:
    """Fit (p_c, nu) to curves {L: (p_array, y_array, sem_array)}.

    Deterministic in the curve contents (insertion order is irrelevant);
    bootstrap intervals resample every point from its quoted error.
    Raises when fewer than two sizes are given, when error bars are not
    positive, or when the best crossing sits on the edge of the grid.
    """
    if len(curves) < 2:
        raise ValueError("need curves for at least two system sizes")
    curves_sorted = []
    for size in sorted(curves):
        p, y, sem = (np.asarray(v, dtype=float) for v in curves[size])
        if not (len(p) == len(y) == len(sem)) or len(p) < 3:
            raise ValueError("each curve needs >= 3 (p, y, sem) points")
        if np.any(sem <= 0):
            raise ValueError("standard errors must be positive")
        curves_sorted.append((int(size), (p, y, sem)))
    all_p = np.concatenate([c[1][0] for c in curves_sorted])
    if p_c_grid is None:
        p_c_grid = np.linspace(all_p.min(), all_p.max(), 33)
    if nu_grid is None:
        nu_grid = np.linspace(0.5, 3.0, 26)
    p_c_grid = np.asarray(p_c_grid, dtype=float)
    nu_grid = np.asarray(nu_grid, dtype=float)

    pc, nu, obj = _fit_once(curves_sorted, p_c_grid, nu_grid)
    if pc <= p_c_grid[0] or pc >= p_c_grid[-1]:
        raise ValueError("no crossing found inside the p_c grid")

    rng = stream(seed, 0xC0)
    boots_pc, boots_nu = [], []
    for _ in range(n_bootstrap):
        perturbed = []
        for size, (p, y, sem) in curves_sorted:
            perturbed.append(
                (size, (p, y + sem * rng.standard_normal(len(y)), sem))
            )
        try:
            bpc, bnu, _ = _fit_once(perturbed, p_c_grid, nu_grid, refine=False)
        except ValueError:
            continue
        boots_pc.append(bpc)
        boots_nu.append(bnu)
    if boots_pc:
        lo_pc, hi_pc = np.percentile(boots_pc, [16, 84])
        lo_nu, hi_nu = np.percentile(boots_nu, [16, 84])
    else:
        lo_pc = hi_pc = pc
        lo_nu = hi_nu = nu
    # quoted intervals always contain the point estimate
    pci = (min(lo_pc, pc), max(hi_pc, pc))
    nui = (min(lo_nu, nu), max(hi_nu, nu))
    return CollapseResult(
        p_c=float(pc),
        nu=float(nu),
        objective=float(obj),
        p_c_interval=(float(pci[0]), float(pci[1])),
        nu_interval=(float(nui[0]), float(nui[1])),
        meta={
            "p_c_grid": (float(p_c_grid[0]), float(p_c_grid[-1]), len(p_c_grid)),
            "nu_grid": (float(nu_grid[0]), float(nu_grid[-1]), len(nu_grid)),
            "n_bootstrap": int(n_bootstrap),
        },
    )


def synthetic_scaling_data(
    p_c: float,
    nu: float,
    sizes,
    p_grid,
    noise: float,
    seed: int = 0,
):
    """Planted-master-curve data for the self-test: y = g(x) + noise."""
    rng = stream(seed, 0x5D)
    curves = {}
    for size in sizes:
        x = (np.asarray(p_grid) - p_c) * size ** (1.0 / nu)
        y = 0.5 * (1.0 - np.tanh(x))
        sem = np.full(len(y), max(noise, 1e-6))
        curves[size] = (
            np.asarray(p_grid, dtype=float),
            y + noise * rng.standard_normal(len(y)),
            sem,
        )
    return curves
