"""numba kernels for the bit-packed stabilizer tableau.

Rows are generators; x/z bit matrices are packed 64 sites per word.  All
kernels mutate preallocated arrays in place and never allocate, so they can
run inside tight trajectory loops.  Phase bookkeeping uses the +/-i class
counts of the per-site Pauli product, which must come out Hermitian for the
commuting products that stabilizer updates perform.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U0 = np.uint64(0)
U1 = np.uint64(1)
M1 = np.uint64(0x5555555555555555)
M2 = np.uint64(0x3333333333333333)
M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
H01 = np.uint64(0x0101010101010101)
U6 = np.uint64(6)
U56 = np.uint64(56)
FULL = np.uint64(0xFFFFFFFFFFFFFFFF)


@njit(cache=True, inline="always")
def _popcount(v):
    v = v - ((v >> U1) & M1)
    v = (v & M2) + ((v >> np.uint64(2)) & M2)
    v = (v + (v >> np.uint64(4))) & M4
    return np.int64((v * H01) >> U56)


@njit(cache=True, inline="always")
def _getbit(words, i, pos):
    return np.int64((words[i, pos >> 6] >> np.uint64(pos & 63)) & U1)


@njit(cache=True, inline="always")
def _setbit(words, i, pos, bit):
    w = np.int64(pos >> 6)
    s = np.uint64(pos & 63)
    words[i, w] = (words[i, w] & ~(U1 << s)) | (np.uint64(bit) << s)


@njit(cache=True)
def product_phase_quadrant(xa, za, xb, zb, nw):
    """i-exponent (mod 4) of the Pauli product row_a * row_b."""
    plus = np.int64(0)
    minus = np.int64(0)
    for w in range(nw):
        ax, az = xa[w], za[w]
        bx, bz = xb[w], zb[w]
        ay = ax & az
        by = bx & bz
        axo = ax & ~az
        azo = ~ax & az
        bxo = bx & ~bz
        bzo = ~bx & bz
        plus += _popcount((axo & by) | (ay & bzo) | (azo & bxo))
        minus += _popcount((ay & bxo) | (azo & by) | (axo & bzo))
    return np.int64((plus - minus) % 4)


@njit(cache=True)
def _row_mult(xw, zw, signs, dst, src, nw):
    """Generator row dst *= row src (commuting rows; sign tracked exactly)."""
    k = product_phase_quadrant(xw[dst], zw[dst], xw[src], zw[src], nw)
    signs[dst] ^= signs[src] ^ np.uint8(k >> 1)
    for w in range(nw):
        xw[dst, w] ^= xw[src, w]
        zw[dst, w] ^= zw[src, w]


@njit(cache=True)
def apply_gate_layer(xw, zw, signs, r, bonds_a, bonds_b, lut_bits, lut_sign):
    """Conjugate all rows through one layer of disjoint two-qubit gates."""
    nb = bonds_a.shape[0]
    for i in range(r):
        for j in range(nb):
            a = bonds_a[j]
            b = bonds_b[j]
            e = (
                _getbit(xw, i, a)
                | (_getbit(zw, i, a) << 1)
                | (_getbit(xw, i, b) << 2)
                | (_getbit(zw, i, b) << 3)
            )
            o = np.int64(lut_bits[j, e])
            signs[i] ^= lut_sign[j, e]
            _setbit(xw, i, a, o & 1)
            _setbit(zw, i, a, (o >> 1) & 1)
            _setbit(xw, i, b, (o >> 2) & 1)
            _setbit(zw, i, b, (o >> 3) & 1)


@njit(cache=True)
def apply_gate_sites(xw, zw, signs, r, sites, lut_bits, lut_sign):
    """Conjugate all rows through one gate on an arbitrary site tuple."""
    arity = sites.shape[0]
    for i in range(r):
        e = np.int64(0)
        for q in range(arity):
            s = sites[q]
            e |= _getbit(xw, i, s) << (2 * q)
            e |= _getbit(zw, i, s) << (2 * q + 1)
        o = np.int64(lut_bits[e])
        signs[i] ^= lut_sign[e]
        for q in range(arity):
            s = sites[q]
            _setbit(xw, i, s, (o >> (2 * q)) & 1)
            _setbit(zw, i, s, (o >> (2 * q + 1)) & 1)


@njit(cache=True)
def anticommuting_rows(xw, zw, r, nw, ox, oz, out_idx):
    """Indices of rows anticommuting with the observable; returns count."""
    cnt = 0
    for i in range(r):
        par = np.int64(0)
        for w in range(nw):
            par += _popcount(xw[i, w] & oz[w]) + _popcount(zw[i, w] & ox[w])
        if par & 1:
            out_idx[cnt] = i
            cnt += 1
    return cnt


@njit(cache=True)
def collapse_anticommuting(xw, zw, signs, nw, anti_idx, n_anti, ox, oz, out_bit):
    """Repair anticommuting generators and install the measured observable."""
    p = anti_idx[0]
    for k in range(1, n_anti):
        _row_mult(xw, zw, signs, anti_idx[k], p, nw)
    for w in range(nw):
        xw[p, w] = ox[w]
        zw[p, w] = oz[w]
    signs[p] = out_bit


@njit(cache=True)
def append_row(xw, zw, signs, r, nw, ox, oz, out_bit):
    for w in range(nw):
        xw[r, w] = ox[w]
        zw[r, w] = oz[w]
    signs[r] = out_bit


@njit(cache=True)
def membership_sign(xw, zw, signs, r, nw, ox, oz, scratch, comb, acc, used):
    """Decide whether the (commuting) observable is in the generated group.

    Returns -1 when outside the group; otherwise the sign bit (0 -> +1) of
    the observable inside the group.  scratch is (rows, 2*nw) workspace,
    comb tracks row combinations, acc is a (2*nw,) accumulator and used a
    combination buffer of the same width as a comb row.
    """
    nw2 = 2 * nw
    # echelonize rows, tracking combinations in comb bitsets
    ncomb = comb.shape[1]
    for i in range(r):
        for w in range(nw):
            scratch[i, w] = xw[i, w]
            scratch[i, nw + w] = zw[i, w]
        for c in range(ncomb):
            comb[i, c] = U0
        comb[i, i >> 6] = U1 << np.uint64(i & 63)
    pivot_pos = np.empty(r, dtype=np.int64)
    npiv = 0
    for i in range(r):
        # reduce row i against established pivots
        for j in range(npiv):
            pw = pivot_pos[j] >> 6
            pb = np.uint64(pivot_pos[j] & 63)
            if (scratch[i, pw] >> pb) & U1:
                for w in range(nw2):
                    scratch[i, w] ^= scratch[j, w]
                for c in range(ncomb):
                    comb[i, c] ^= comb[j, c]
        # find leading bit
        lead = np.int64(-1)
        for w in range(nw2 - 1, -1, -1):
            if scratch[i, w] != U0:
                v = scratch[i, w]
                b = np.int64(0)
                while v > U1:
                    v >>= U1
                    b += 1
                lead = (w << 6) + b
                break
        if lead >= 0:
            # swap into pivot slot npiv
            if i != npiv:
                for w in range(nw2):
                    tmp = scratch[npiv, w]
                    scratch[npiv, w] = scratch[i, w]
                    scratch[i, w] = tmp
                for c in range(ncomb):
                    tmpc = comb[npiv, c]
                    comb[npiv, c] = comb[i, c]
                    comb[i, c] = tmpc
            pivot_pos[npiv] = lead
            npiv += 1
    # reduce the observable
    for w in range(nw):
        acc[w] = ox[w]
        acc[nw + w] = oz[w]
    for c in range(used.shape[0]):
        used[c] = U0
    for j in range(npiv):
        pw = pivot_pos[j] >> 6
        pb = np.uint64(pivot_pos[j] & 63)
        if (acc[pw] >> pb) & U1:
            for w in range(nw2):
                acc[w] ^= scratch[j, w]
            for c in range(used.shape[0]):
                used[c] ^= comb[j, c]
    for w in range(nw2):
        if acc[w] != U0:
            return np.int64(-1)
    # multiply out the selected generators to recover the exact sign
    sign = np.int64(0)
    plus_minus = np.int64(0)
    for w in range(nw):
        acc[w] = U0
        acc[nw + w] = U0
    for i in range(r):
        if (used[i >> 6] >> np.uint64(i & 63)) & U1:
            plus_minus += product_phase_quadrant(
                acc[:nw], acc[nw:], xw[i], zw[i], nw
            )
            sign ^= np.int64(signs[i])
            for w in range(nw):
                acc[w] ^= xw[i, w]
                acc[nw + w] ^= zw[i, w]
    plus_minus %= 4
    return sign ^ (plus_minus >> 1)


@njit(cache=True)
def masked_rank(xw, zw, r, nw, mask, scratch):
    """GF(2) rank of generator rows with x/z columns restricted by mask."""
    nw2 = 2 * nw
    pivot_pos = np.empty(r, dtype=np.int64)
    npiv = 0
    for i in range(r):
        for w in range(nw):
            scratch[npiv, w] = xw[i, w] & mask[w]
            scratch[npiv, nw + w] = zw[i, w] & mask[w]
        for j in range(npiv):
            pw = pivot_pos[j] >> 6
            pb = np.uint64(pivot_pos[j] & 63)
            if (scratch[npiv, pw] >> pb) & U1:
                for w in range(nw2):
                    scratch[npiv, w] ^= scratch[j, w]
        lead = np.int64(-1)
        for w in range(nw2 - 1, -1, -1):
            if scratch[npiv, w] != U0:
                v = scratch[npiv, w]
                b = np.int64(0)
                while v > U1:
                    v >>= U1
                    b += 1
                lead = (w << 6) + b
                break
        if lead >= 0:
            pivot_pos[npiv] = lead
            npiv += 1
    return npiv


@njit(cache=True)
def commute_parity_all(xw, zw, r, nw, out):
    """out[i,j] = symplectic parity of rows i and j (debug invariant check)."""
    for i in range(r):
        for j in range(r):
            par = np.int64(0)
            for w in range(nw):
                par += _popcount(xw[i, w] & zw[j, w]) + _popcount(
                    zw[i, w] & xw[j, w]
                )
            out[i, j] = par & 1
