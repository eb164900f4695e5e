"""Compiled inner loops for trajectory simulation."""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["boole_hit_times"]


@njit(cache=True, fastmath=True)
def boole_hit_times(starts, lo, hi, cap, block=2048):
    """First n in [1, cap] with T^n(x) in [lo, hi] under T(x) = x - 1/x.

    Returns 0 for censored samples.  Lanes are compacted every ``block``
    steps so the hot loop has no data-dependent branches on finished
    samples; within a block every lane keeps stepping and the first hit
    step is recorded without interrupting the lane.
    """
    n = starts.shape[0]
    out = np.zeros(n, dtype=np.int64)
    x = starts.copy()
    idx = np.arange(n)
    hit = np.zeros(n, dtype=np.int64)
    nact = n
    step0 = 0
    while nact > 0 and step0 < cap:
        nb = min(block, cap - step0)
        for s in range(1, nb + 1):
            for j in range(nact):
                xj = x[j]
                if xj == 0.0:
                    xj = 1e-300  # singular point, measure zero
                xj = xj - 1.0 / xj
                x[j] = xj
                if lo <= xj <= hi and hit[j] == 0:
                    hit[j] = step0 + s
        step0 += nb
        k = 0
        for j in range(nact):
            if hit[j] == 0:
                x[k] = x[j]
                idx[k] = idx[j]
                hit[k] = 0
                k += 1
            else:
                out[idx[j]] = hit[j]
        nact = k
    return out
