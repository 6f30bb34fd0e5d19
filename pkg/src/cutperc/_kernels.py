"""Numba-compiled inner loops: exact enumeration and Monte Carlo sampling.

The RNG is a counter-based splitmix64 stream (published constants), so every
estimate is reproducible bit-for-bit across platforms.  Value index ``i`` of
stream ``seed`` is ``mix(seed + (i+1)*GOLDEN)``; Monte Carlo state of vertex
``v`` in sample ``s`` on an n-vertex graph uses value index ``s*n + v``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64_py(x: int) -> int:
    """Pure-python splitmix64 finalizer; twin of the jitted version."""
    z = x & MASK64
    z = (z ^ (z >> 30)) * _M1 & MASK64
    z = (z ^ (z >> 27)) * _M2 & MASK64
    return z ^ (z >> 31)


def stream_value(seed: int, index: int) -> int:
    """Value `index` of the counter-based stream with the given seed."""
    return mix64_py((seed + (index + 1) * GOLDEN) & MASK64)


def derive_seed(master: int, *vals: int) -> int:
    """Deterministically fold integers into a sub-stream seed."""
    s = master & MASK64
    for v in vals:
        s = mix64_py((s * _M1 + v + GOLDEN) & MASK64)
    return s


def open_threshold(p: float) -> tuple[np.uint64, bool]:
    """uint64 threshold t with P(u64 < t) = p, plus an always-open flag."""
    if p >= 1.0:
        return np.uint64(0), True
    if p <= 0.0:
        return np.uint64(0), False
    return np.uint64(int(p * 2.0 ** 64)), False


@njit(cache=True, inline="always")
def _mix64(z):
    z = np.uint64(z)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _stream_value(seed, index):
    return _mix64(np.uint64(seed) + (np.uint64(index) + np.uint64(1)) * np.uint64(GOLDEN))


@njit(cache=True, inline="always")
def _popcount(c):
    n = 0
    while c:
        c &= c - 1
        n += 1
    return n


@njit(cache=True, inline="always")
def _reach_mask(open_m, adj, src, path_mask):
    """Open vertices reachable from src through open path_mask vertices.

    Returns 0 when src itself is closed; src need not be in path_mask."""
    if not (open_m >> np.uint64(src)) & np.uint64(1):
        return np.uint64(0)
    reach = np.uint64(1) << np.uint64(src)
    avail = open_m & np.uint64(path_mask) & ~reach
    frontier = reach
    while frontier != np.uint64(0):
        nxt = np.uint64(0)
        m = frontier
        while m != np.uint64(0):
            u = 0
            while not (m >> np.uint64(u)) & np.uint64(1):
                u += 1
            nxt |= adj[u]
            m &= m - np.uint64(1)
        nxt &= avail
        if nxt == np.uint64(0):
            break
        reach |= nxt
        avail &= ~nxt
        frontier = nxt
    return reach


@njit(cache=True)
def enum_event_probs(k, adj, src, path_mask, target_masks, req_masks,
                     ext_term, ext_bit, ext_nbr_mask, p):
    """Exact probabilities of reach events by summing over all 2^k configurations.

    Each term t succeeds when the open cluster of src (within path_mask)
    touches target_masks[t], or when an ext entry of that term fires (cluster
    touches ext_nbr_mask[j] and the optional ext state bit is open); req_masks[t]
    lists vertices additionally required open.  Summation runs in fixed
    configuration order for bit-stable results.
    """
    nt = target_masks.shape[0]
    ne = ext_term.shape[0]
    out = np.zeros(nt, dtype=np.float64)
    pw = np.empty(k + 1, dtype=np.float64)
    qw = np.empty(k + 1, dtype=np.float64)
    pw[0] = 1.0
    qw[0] = 1.0
    for i in range(1, k + 1):
        pw[i] = pw[i - 1] * p
        qw[i] = qw[i - 1] * (1.0 - p)
    for c in range(1 << k):
        open_m = np.uint64(c)
        nopen = _popcount(c)
        w = pw[nopen] * qw[k - nopen]
        if w == 0.0:
            continue
        reach = _reach_mask(open_m, adj, src, path_mask)
        if reach == np.uint64(0):
            continue
        for t in range(nt):
            if (open_m & req_masks[t]) != req_masks[t]:
                continue
            hit = (reach & target_masks[t]) != np.uint64(0)
            if not hit and ne > 0:
                for j in range(ne):
                    if ext_term[j] != t:
                        continue
                    if (reach & ext_nbr_mask[j]) == np.uint64(0):
                        continue
                    b = ext_bit[j]
                    if b >= 0 and not (open_m >> np.uint64(b)) & np.uint64(1):
                        continue
                    hit = True
                    break
            if hit:
                out[t] += w
    return out


@njit(cache=True)
def enum_indicator_table(k, adj, src, path_mask, target_mask):
    """Per-configuration indicator of the reach event, for pivotal sums."""
    out = np.zeros(1 << k, dtype=np.uint8)
    for c in range(1 << k):
        reach = _reach_mask(np.uint64(c), adj, src, path_mask)
        if (reach & np.uint64(target_mask)) != np.uint64(0):
            out[c] = 1
    return out


@njit(cache=True, inline="always")
def _uf_find(parent, stamp, size, epoch, x):
    if stamp[x] != epoch:
        stamp[x] = epoch
        parent[x] = x
        size[x] = 1
        return x
    while parent[x] != x:
        parent[x] = parent[parent[x]]  # path halving
        x = parent[x]
    return x


@njit(cache=True)
def mc_counts(m, n_global, gids, indptr, indices, path_allowed, src,
              t_ptr, t_ids, req_ids, ext_vertex, ext_term, ext_needs_open,
              ext_nbr_ptr, ext_nbr_ids, thresh, always_open, samples, seed):
    """Monte Carlo success counts for reach events on a support subgraph.

    Vertices 0..m-1 are support-local; gids maps them to graph indices so the
    state stream is identical however the support was carved out.  Connectivity
    uses union-find (union by size, path halving) with epoch-stamped lazy reset.
    Returns (per-term counts, sum of per-sample term totals, sum of squares).
    """
    nt = t_ptr.shape[0] - 1
    ne = ext_vertex.shape[0]
    counts = np.zeros(nt, dtype=np.int64)
    sum_t = np.int64(0)
    sum_t2 = np.int64(0)
    open_st = np.zeros(m, dtype=np.uint8)
    parent = np.zeros(m, dtype=np.int32)
    size = np.zeros(m, dtype=np.int32)
    stamp = np.full(m, -1, dtype=np.int64)
    for s in range(samples):
        base = np.uint64(s) * np.uint64(n_global)
        for i in range(m):
            if always_open:
                open_st[i] = 1
            else:
                z = _stream_value(seed, base + np.uint64(gids[i]))
                open_st[i] = 1 if z < thresh else 0
        if open_st[src] == 0:
            continue
        epoch = np.int64(s)
        for u in range(m):
            if open_st[u] == 0 or path_allowed[u] == 0:
                continue
            for idx in range(indptr[u], indptr[u + 1]):
                v = indices[idx]
                if v <= u or open_st[v] == 0 or path_allowed[v] == 0:
                    continue
                ru = _uf_find(parent, stamp, size, epoch, u)
                rv = _uf_find(parent, stamp, size, epoch, v)
                if ru != rv:
                    if size[ru] < size[rv]:
                        ru, rv = rv, ru
                    parent[rv] = ru
                    size[ru] += size[rv]
        ok_req = True
        for j in range(req_ids.shape[0]):
            if open_st[req_ids[j]] == 0:
                ok_req = False
                break
        if not ok_req:
            continue
        rs = _uf_find(parent, stamp, size, epoch, src)
        t_total = 0
        for t in range(nt):
            hit = False
            for idx in range(t_ptr[t], t_ptr[t + 1]):
                tid = t_ids[idx]
                if open_st[tid] == 1 and _uf_find(parent, stamp, size, epoch, tid) == rs:
                    hit = True
                    break
            if not hit:
                for j in range(ne):
                    if ext_term[j] != t:
                        continue
                    if ext_needs_open[j] == 1 and open_st[ext_vertex[j]] == 0:
                        continue
                    for idx in range(ext_nbr_ptr[j], ext_nbr_ptr[j + 1]):
                        nb = ext_nbr_ids[idx]
                        if open_st[nb] == 1 and \
                                _uf_find(parent, stamp, size, epoch, nb) == rs:
                            hit = True
                            break
                    if hit:
                        break
            if hit:
                counts[t] += 1
                t_total += 1
        sum_t += t_total
        sum_t2 += t_total * t_total
    return counts, sum_t, sum_t2


@njit(cache=True)
def sample_states(n, thresh, always_open, sample_index, seed):
    """Open/closed states of all n vertices for one Monte Carlo sample."""
    out = np.zeros(n, dtype=np.uint8)
    base = np.uint64(sample_index) * np.uint64(n)
    for v in range(n):
        if always_open:
            out[v] = 1
        elif _stream_value(seed, base + np.uint64(v)) < thresh:
            out[v] = 1
    return out
