"""Numba kernels. Same signatures and results as ``_kernels_np``."""

import numba as nb
import numpy as np

njit_kwargs = {"nogil": True, "cache": True}


@nb.njit(**njit_kwargs)
def unrank_lex(rank, m):
    """Permutation of ``range(m)`` at lexicographic position ``rank``."""
    fact = np.ones(m + 1, dtype=np.int64)
    for i in range(1, m + 1):
        fact[i] = fact[i - 1] * i
    avail = np.ones(m, dtype=np.bool_)
    perm = np.empty(m, dtype=np.int64)
    r = rank
    for k in range(m):
        f = fact[m - 1 - k]
        d = r // f
        r -= d * f
        for b in range(m):
            if avail[b]:
                if d == 0:
                    perm[k] = b
                    avail[b] = False
                    break
                d -= 1
    return perm


@nb.njit(**njit_kwargs)
def next_permutation(perm):
    n = perm.shape[0]
    i = n - 2
    while i >= 0 and perm[i] >= perm[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = n - 1
    while perm[j] <= perm[i]:
        j -= 1
    perm[i], perm[j] = perm[j], perm[i]
    lo = i + 1
    hi = n - 1
    while lo < hi:
        perm[lo], perm[hi] = perm[hi], perm[lo]
        lo += 1
        hi -= 1
    return True


@nb.njit(**njit_kwargs)
def _simulate_into(perm, m, step_ptr, ev_buf, counts):
    n_steps = step_ptr.shape[0] - 1
    occ = 0
    for t in range(n_steps):
        if t >= 1 and occ != 0:
            for j in range(m):
                bit = 1 << perm[j]
                if occ & bit:
                    occ ^= bit
                    break
        for k in range(step_ptr[t], step_ptr[t + 1]):
            bit = 1 << ev_buf[k]
            if not occ & bit:
                occ |= bit
                counts[k] += 1


@nb.njit(**njit_kwargs)
def count_rank_range(m, step_ptr, ev_buf, lo, hi):
    """Per-event acceptance counts over permutation ranks ``[lo, hi)``."""
    counts = np.zeros(ev_buf.shape[0], dtype=np.int64)
    if hi <= lo:
        return counts
    perm = unrank_lex(lo, m)
    for _ in range(hi - lo):
        _simulate_into(perm, m, step_ptr, ev_buf, counts)
        next_permutation(perm)
    return counts


@nb.njit(**njit_kwargs)
def count_perms(perms, step_ptr, ev_buf):
    """Per-event acceptance counts summed over the rows of ``perms``."""
    m = perms.shape[1]
    counts = np.zeros(ev_buf.shape[0], dtype=np.int64)
    for r in range(perms.shape[0]):
        _simulate_into(perms[r], m, step_ptr, ev_buf, counts)
    return counts


@nb.njit(**njit_kwargs)
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@nb.njit(**njit_kwargs)
def opt_dp(m, arrivals):
    """Forward DP over occupancy masks.

    ``arrivals[t]`` is the mask of buffers receiving a packet at step ``t``.
    Duplicate arrivals are always lost, so they never enter the value.
    Returns the value row after the last step plus backpointers.
    Choice ``m`` means idle. Ties keep the first candidate in
    (choice, source mask) order: lowest buffer first, idle last.
    """
    n_steps = arrivals.shape[0]
    size = 1 << m
    parent = np.full((n_steps, size), -1, dtype=np.int32)
    choice = np.full((n_steps, size), -1, dtype=np.int8)
    cur = np.full(size, -1, dtype=np.int64)
    if n_steps == 0:
        cur[0] = 0
        return cur, parent, choice
    a0 = arrivals[0]
    cur[a0] = _popcount(a0)
    nxt = np.empty(size, dtype=np.int64)
    for t in range(1, n_steps):
        a = arrivals[t]
        nxt[:] = -1
        for c in range(m + 1):
            for src in range(size):
                v = cur[src]
                if v < 0:
                    continue
                if c < m:
                    if not (src >> c) & 1:
                        continue
                    mid = src & ~(1 << c)
                else:
                    mid = src
                new = mid | a
                val = v + _popcount(a & ~mid)
                if val > nxt[new]:
                    nxt[new] = val
                    parent[t, new] = src
                    choice[t, new] = c
        cur, nxt = nxt, cur
    return cur, parent, choice
