"""Numba kernels for the last-passage dynamic program.

The recurrence is evaluated cellwise, G = w + max(up, left, entry), with
no algebraic reshuffling, so a value equals the left-fold sum of weights
along its maximizing path and matches brute-force path enumeration
bit-for-bit.  A single row buffer is updated in place; `lo` gives the
leftmost reachable column per row and is nonincreasing, which keeps all
never-written cells at NEG.
"""

import numpy as np
from numba import njit

NEG = -1.0e30
BLOCKED_CUTOFF = -1.0e29  # values below this mean "no admissible path"


@njit(cache=True, nogil=True)
def dp_advance(
    W,          # (nr, bw) float64 weights, column c of W is lattice col w0 + c
    woff,       # i0 - w0: W[r, i + woff] is the weight at g slot i
    g,          # (width,) float64 running row values, updated in place
    i0,         # absolute column of g[0]
    lo,         # (nr,) int64 absolute leftmost active column per row
    em,         # (width,) uint8 scratch, zeroed between rows
    ent_ptr,    # (nr+1,) int64 CSR pointers into ent_col
    ent_col,    # absolute columns of start-set entries
    blk_lo,     # (nr,) int64 absolute blocked interval (lo > hi: none)
    blk_hi,
    end_ptr,    # (nr+1,) int64 CSR pointers into end_col/end_idx
    end_col,
    end_idx,
    end_out,    # (n_ends,) float64 harvested values
    G,          # value grid, written when store is True (else 1x1 dummy)
    store,
    row_off,    # G row index of the first block row
):
    nr = W.shape[0]
    width = g.shape[0]
    for r in range(nr):
        for e in range(ent_ptr[r], ent_ptr[r + 1]):
            em[ent_col[e] - i0] = 1
        s = lo[r] - i0
        if s < 0:
            s = 0
        left = NEG
        if s > 0:
            left = g[s - 1]
        b0 = blk_lo[r] - i0
        b1 = blk_hi[r] - i0
        if b1 >= width:
            b1 = width - 1
        if b0 > b1 or b1 < s:
            b0, b1 = width, width - 1  # no blocked cells in the active range
        elif b0 < s:
            b0 = s
        i = s
        while i < width:
            if i == b0:
                for k in range(b0, b1 + 1):
                    g[k] = NEG
                left = NEG
                i = b1 + 1
                continue
            stop = b0 if b0 > i else width
            while i < stop:
                up = g[i]
                best = up if up >= left else left
                if em[i] and best < 0.0:
                    best = 0.0
                v = W[r, i + woff] + best
                g[i] = v
                left = v
                i += 1
        for e in range(ent_ptr[r], ent_ptr[r + 1]):
            em[ent_col[e] - i0] = 0
        for e in range(end_ptr[r], end_ptr[r + 1]):
            end_out[end_idx[e]] = g[end_col[e] - i0]
        if store:
            G[row_off + r, :] = g
