"""Compiled inner loop: coin + shift fused with per-tick moment accumulation."""

import numba as nb
import numpy as np


@nb.njit(cache=True, nogil=True)
def evolve_one(lengths, coin, a0, b0, cap, snap_slot, moments, snaps):
    """Evolve one realization for ``len(lengths)`` ticks.

    moments[t] receives (sum f, sum x f, sum x^2 f) at tick t (row 0 is t=0).
    snaps[snap_slot[t]] receives f at tick t whenever snap_slot[t] >= 0.
    Only the light cone [lo, hi] is touched each tick.
    """
    size = 2 * cap + 1
    left = np.zeros(size, np.complex128)
    right = np.zeros(size, np.complex128)
    left2 = np.zeros(size, np.complex128)
    right2 = np.zeros(size, np.complex128)
    left[cap] = a0
    right[cap] = b0
    c00 = coin[0, 0]
    c01 = coin[0, 1]
    c10 = coin[1, 0]
    c11 = coin[1, 1]
    lo = cap
    hi = cap

    p0 = a0.real * a0.real + a0.imag * a0.imag + b0.real * b0.real + b0.imag * b0.imag
    moments[0, 0] = p0
    moments[0, 1] = 0.0
    moments[0, 2] = 0.0
    if snap_slot[0] >= 0:
        snaps[snap_slot[0], cap] = p0

    for t in range(lengths.shape[0]):
        ell = lengths[t]
        if lo - ell < 0 or hi + ell >= size:
            return t + 1
        for i in range(lo - ell, hi + ell + 1):
            left2[i] = 0.0
            right2[i] = 0.0
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        for i in range(lo, hi + 1):
            u = left[i]
            v = right[i]
            nl = c00 * u + c01 * v
            nr = c10 * u + c11 * v
            left2[i - ell] = nl
            right2[i + ell] = nr
            pl = nl.real * nl.real + nl.imag * nl.imag
            pr = nr.real * nr.real + nr.imag * nr.imag
            xl = float(i - ell - cap)
            xr = float(i + ell - cap)
            s0 += pl + pr
            s1 += xl * pl + xr * pr
            s2 += xl * xl * pl + xr * xr * pr
        left, left2 = left2, left
        right, right2 = right2, right
        lo -= ell
        hi += ell
        moments[t + 1, 0] = s0
        moments[t + 1, 1] = s1
        moments[t + 1, 2] = s2
        slot = snap_slot[t + 1]
        if slot >= 0:
            for i in range(lo, hi + 1):
                u = left[i]
                v = right[i]
                snaps[slot, i] = u.real * u.real + u.imag * u.imag + v.real * v.real + v.imag * v.imag
    return 0


@nb.njit(cache=True, nogil=True)
def evolve_batch(lengths, coin, a0, b0, cap, snap_slot, moments, snaps):
    """Run ``evolve_one`` for every row of ``lengths``; returns first failure code or 0."""
    for r in range(lengths.shape[0]):
        code = evolve_one(lengths[r], coin, a0, b0, cap, snap_slot, moments[r], snaps[r])
        if code != 0:
            return code
    return 0
