"""Pure-numpy kernels, vectorized across blocks of permutations.

Selected when numba is unavailable or ``PERMUBUF_NO_NUMBA`` is set.
"""

import math

import numpy as np

BLOCK = 1 << 15


def unrank_lex_block(ranks, m):
    """Rows of ``range(m)`` permutations at the given lexicographic ranks."""
    ranks = np.asarray(ranks, dtype=np.int64)
    B = ranks.shape[0]
    rows = np.arange(B)
    r = ranks.copy()
    avail = np.ones((B, m), dtype=bool)
    perms = np.empty((B, m), dtype=np.int64)
    for k in range(m):
        f = math.factorial(m - 1 - k)
        d = r // f
        r -= d * f
        # position of the d-th still-available buffer
        hit = (np.cumsum(avail, axis=1) - 1 == d[:, None]) & avail
        b = hit.argmax(axis=1)
        perms[:, k] = b
        avail[rows, b] = False
    return perms


def unrank_lex(rank, m):
    return unrank_lex_block(np.array([rank]), m)[0]


def count_perms(perms, step_ptr, ev_buf):
    perms = np.asarray(perms, dtype=np.int64)
    B, m = perms.shape
    counts = np.zeros(ev_buf.shape[0], dtype=np.int64)
    if B == 0:
        return counts
    rows = np.arange(B)
    pos = np.empty_like(perms)
    pos[rows[:, None], perms] = np.arange(m)
    occ = np.zeros((B, m), dtype=bool)
    n_steps = step_ptr.shape[0] - 1
    for t in range(n_steps):
        if t >= 1:
            key = np.where(occ, pos, m)
            b = key.argmin(axis=1)
            busy = key[rows, b] < m
            occ[rows[busy], b[busy]] = False
        for k in range(step_ptr[t], step_ptr[t + 1]):
            col = occ[:, ev_buf[k]]
            counts[k] += B - np.count_nonzero(col)
            col[:] = True
    return counts


def count_rank_range(m, step_ptr, ev_buf, lo, hi):
    counts = np.zeros(ev_buf.shape[0], dtype=np.int64)
    for start in range(lo, hi, BLOCK):
        ranks = np.arange(start, min(start + BLOCK, hi), dtype=np.int64)
        counts += count_perms(unrank_lex_block(ranks, m), step_ptr, ev_buf)
    return counts


def _popcount(x):
    x = np.asarray(x, dtype=np.int64)
    c = np.zeros(x.shape, dtype=np.int64)
    while np.any(x):
        c += x & 1
        x = x >> 1
    return c


def opt_dp(m, arrivals):
    n_steps = arrivals.shape[0]
    size = 1 << m
    parent = np.full((n_steps, size), -1, dtype=np.int32)
    choice = np.full((n_steps, size), -1, dtype=np.int8)
    cur = np.full(size, -1, dtype=np.int64)
    if n_steps == 0:
        cur[0] = 0
        return cur, parent, choice
    a0 = int(arrivals[0])
    cur[a0] = int(_popcount(a0))
    for t in range(1, n_steps):
        a = int(arrivals[t])
        src_all = np.flatnonzero(cur >= 0).astype(np.int64)
        cand_new, cand_val, cand_src, cand_c = [], [], [], []
        for c in range(m + 1):
            if c < m:
                src = src_all[(src_all >> c) & 1 == 1]
                mid = src & ~(1 << c)
            else:
                src = src_all
                mid = src
            cand_new.append(mid | a)
            cand_val.append(cur[src] + _popcount(a & ~mid))
            cand_src.append(src)
            cand_c.append(np.full(src.shape, c, dtype=np.int64))
        new = np.concatenate(cand_new)
        val = np.concatenate(cand_val)
        src = np.concatenate(cand_src)
        cc = np.concatenate(cand_c)
        # best value per target, ties to the lowest (choice, source)
        order = np.lexsort((src, cc, -val, new))
        new, val, src, cc = new[order], val[order], src[order], cc[order]
        first = np.ones(new.shape, dtype=bool)
        first[1:] = new[1:] != new[:-1]
        nxt = np.full(size, -1, dtype=np.int64)
        nxt[new[first]] = val[first]
        parent[t, new[first]] = src[first]
        choice[t, new[first]] = cc[first]
        cur = nxt
    return cur, parent, choice
