"""Seeded Monte Carlo estimation of the exact-engine events.

Sampling uses the counter-based splitmix64 stream from ``_kernels``: the state
of vertex v in sample s is value ``s*n + v`` of the stream, so estimates are
bit-identical across runs and platforms for a fixed seed.  Connectivity per
sample goes through union-find (union by size, path halving, epoch reset).
"""

from __future__ import annotations

import io
import csv
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ContractError
from .graph_core import (EdgeCutset, Patch, VertexCutset, VertexSet,
                         interior_of, validate_edge_cutset,
                         validate_vertex_cutset)
from .exact_engine import Configuration

DEFAULT_SAMPLES = 100_000
DEFAULT_SEED = 0x5EEDCA7

SIGMA_MARGIN = 4.0


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int

    def agrees_with(self, exact: float, sigmas: float = SIGMA_MARGIN) -> bool:
        slack = sigmas * self.stderr
        return abs(self.mean - exact) <= max(slack, 1e-12)


# ---------------------------------------------------------------------------
# Event descriptors

@dataclass(frozen=True)
class FrontierConn:
    v: int

    def describe(self) -> str:
        return f"frontier_conn(v={self.v})"


@dataclass(frozen=True)
class InteriorConn:
    s: VertexSet
    v: int
    y: int

    def describe(self) -> str:
        return f"interior_conn(v={self.v},y={self.y})"


@dataclass(frozen=True)
class VertexCutEvent:
    x: int
    v: int
    cut: VertexCutset

    def describe(self) -> str:
        return f"vertex_cut_event(x={self.x},v={self.v})"


@dataclass(frozen=True)
class EdgeCutEvent:
    x: int
    e: tuple
    cut: EdgeCutset

    def describe(self) -> str:
        return f"edge_cut_event(x={self.x},e={self.e[0]}-{self.e[1]})"


@dataclass(frozen=True)
class Restricted:
    u: int
    a: frozenset
    b: frozenset

    def describe(self) -> str:
        return f"restricted(u={self.u})"


# ---------------------------------------------------------------------------
# Sampling stream

class SampleStream:
    """Mutable cursor over the vertex-state stream; one block per configuration."""

    def __init__(self, seed: int = DEFAULT_SEED):
        self.seed = seed
        self.counter = 0


def sample_config(patch: Patch, p: float, stream: SampleStream) -> Configuration:
    """Draw one independent Bernoulli(p) configuration; ghosts stay closed."""
    if not 0.0 <= p <= 1.0:
        raise ContractError(f"p={p} outside [0,1]")
    n = patch.graph.n
    thresh, always = _kernels.open_threshold(p)
    states = np.zeros(n, dtype=np.uint8)
    for v in range(n):
        if v in patch.ghosts:
            continue
        if always or _kernels.stream_value(stream.seed, stream.counter + v) < int(thresh):
            states[v] = 1
    stream.counter += n
    return Configuration(patch, states)


# ---------------------------------------------------------------------------
# Event planning: mirror of the exact-engine semantics, minus the size caps.

def _plan(patch: Patch, event):
    """Return (support, path_vertices, src, terms, removed_edges) in global ids."""
    gadj = patch.graph.adjacency
    if isinstance(event, FrontierConn):
        if event.v in patch.ghosts:
            raise ContractError("v must be a non-ghost vertex")
        real = patch.non_ghosts
        return real, real, event.v, [(sorted(patch.frontier_adjacent), (), ())], ()
    if isinstance(event, InteriorConn):
        members = event.s.members
        if not members <= patch.non_ghosts:
            raise ContractError("s must consist of non-ghost vertices")
        sint = interior_of(patch.graph, members)
        if event.v not in sint:
            raise ContractError("v must lie in the interior of s")
        if event.y not in members:
            raise ContractError("y must lie in s")
        targets = [w for w in gadj[event.y] if w in sint]
        return sint, sint, event.v, [(targets, (), ())], ()
    if isinstance(event, VertexCutEvent):
        cut = event.cut
        if not validate_vertex_cutset(patch, cut):
            raise ContractError("invalid vertex cutset")
        if event.v not in cut.members:
            raise ContractError("v must be a cut member")
        support = patch.non_ghosts - (cut.members - {event.v})
        if event.x not in support:
            return None  # x is itself an avoided cut member: impossible event
        return support, support, event.x, [([event.v], (), ())], ()
    if isinstance(event, EdgeCutEvent):
        cut = event.cut
        if not validate_edge_cutset(patch, cut):
            raise ContractError("invalid edge cutset")
        e = tuple(sorted(event.e))
        if e not in cut.members:
            raise ContractError("e must be a cut member")
        removed = cut.members - {e}
        real = patch.non_ghosts
        targets = [w for w in e if w not in patch.ghosts]
        ext = []
        for w in e:
            if w in patch.ghosts:
                nbrs = [z for z in gadj[w]
                        if z not in patch.ghosts
                        and tuple(sorted((w, z))) not in removed]
                ext.append((None, nbrs))
        return real, real, event.x, [(targets, tuple(targets), ext)], removed
    if isinstance(event, Restricted):
        a, b = event.a, event.b
        if event.u not in a:
            raise ContractError("u must lie in a")
        if not a <= patch.non_ghosts:
            raise ContractError("a must consist of non-ghost vertices")
        targets = sorted(b & a)
        ext = []
        for x in sorted(b - a):
            nbrs = [w for w in gadj[x] if w in a]
            if nbrs:
                ext.append((x if x not in patch.ghosts else None, nbrs))
        support = set(a) | {sv for sv, _ in ext if sv is not None}
        return support, a, event.u, [(targets, (), ext)], ()
    raise ContractError(f"unknown event type {type(event).__name__}")


def _run_kernel(patch: Patch, support, path_vertices, src, terms, removed_edges,
                p, samples, seed):
    order = sorted(support)
    local = {g: i for i, g in enumerate(order)}
    removed = {tuple(sorted(e)) for e in removed_edges}
    indptr = [0]
    indices = []
    for g in order:
        for w in patch.graph.adjacency[g]:
            if w in local and tuple(sorted((g, w))) not in removed:
                indices.append(local[w])
        indptr.append(len(indices))
    path_allowed = np.zeros(len(order), dtype=np.uint8)
    for g in path_vertices:
        path_allowed[local[g]] = 1
    t_ptr, t_ids = [0], []
    req_ids: list[int] = []
    ext_vertex, ext_term, ext_needs, ext_nbr_ptr, ext_nbr_ids = [], [], [], [0], []
    for t, (targets, req, ext) in enumerate(terms):
        t_ids.extend(local[g] for g in targets)
        t_ptr.append(len(t_ids))
        req_ids.extend(local[g] for g in req)
        for state_v, nbrs in ext:
            ext_term.append(t)
            if state_v is None:
                ext_vertex.append(0)
                ext_needs.append(0)
            else:
                ext_vertex.append(local[state_v])
                ext_needs.append(1)
            ext_nbr_ids.extend(local[g] for g in nbrs)
            ext_nbr_ptr.append(len(ext_nbr_ids))
    thresh, always = _kernels.open_threshold(p)
    return _kernels.mc_counts(
        len(order), patch.graph.n,
        np.asarray(order, dtype=np.int64),
        np.asarray(indptr, dtype=np.int64), np.asarray(indices, dtype=np.int64),
        path_allowed, local[src],
        np.asarray(t_ptr, dtype=np.int64), np.asarray(t_ids, dtype=np.int64),
        np.asarray(req_ids, dtype=np.int64),
        np.asarray(ext_vertex, dtype=np.int64),
        np.asarray(ext_term, dtype=np.int64),
        np.asarray(ext_needs, dtype=np.int64),
        np.asarray(ext_nbr_ptr, dtype=np.int64),
        np.asarray(ext_nbr_ids, dtype=np.int64),
        thresh, always, samples, np.uint64(seed))


def _shard_sizes(samples: int, shards: int) -> list[int]:
    base, rem = divmod(samples, shards)
    return [base + (1 if s < rem else 0) for s in range(shards)]


def mc_event_prob(patch: Patch, event, p: float, samples: int,
                  seed: int = DEFAULT_SEED, shards: int = 1) -> MCEstimate:
    """Indicator average over seeded configurations; stderr by the binomial rule."""
    if samples <= 0:
        raise ContractError("samples must be positive")
    if not 0.0 <= p <= 1.0:
        raise ContractError(f"p={p} outside [0,1]")
    plan = _plan(patch, event)
    if plan is None:
        return MCEstimate(mean=0.0, stderr=0.0, samples=samples, seed=seed)
    hits = 0
    for s, sz in enumerate(_shard_sizes(samples, shards)):
        if sz == 0:
            continue
        shard_seed = seed if shards == 1 else _kernels.derive_seed(seed, s)
        counts, _, _ = _run_kernel(patch, *plan, p, sz, shard_seed)
        hits += int(counts[0])
    mean = hits / samples
    stderr = math.sqrt(mean * (1.0 - mean) / samples)
    return MCEstimate(mean=mean, stderr=stderr, samples=samples, seed=seed)


def mc_phi(patch: Patch, s: VertexSet, v: int, p: float, samples: int,
           seed: int = DEFAULT_SEED, shards: int = 1) -> dict:
    """All boundary terms in one pass per configuration; total with its stderr.

    The per-sample statistic behind the total is the integer number of
    satisfied terms, so the total's stderr accounts for term correlations.
    """
    if samples <= 0:
        raise ContractError("samples must be positive")
    members = s.members
    if v not in members:
        raise ContractError("v must lie in s")
    if not members <= patch.non_ghosts:
        raise ContractError("s must consist of non-ghost vertices")
    sint = interior_of(patch.graph, members)
    if v not in sint:
        return {"total": 1.0, "total_stderr": 0.0, "terms": {}, "degenerate": True,
                "samples": samples, "seed": seed}
    gadj = patch.graph.adjacency
    ys = sorted(y for y in members if any(w not in members for w in gadj[y]))
    terms = []
    term_ys = []
    zero_ys = []
    for y in ys:
        targets = [w for w in gadj[y] if w in sint]
        if targets:
            terms.append((targets, (), ()))
            term_ys.append(y)
        else:
            zero_ys.append(y)
    out_terms = {y: MCEstimate(0.0, 0.0, samples, seed) for y in zero_ys}
    if not terms:
        return {"total": 0.0, "total_stderr": 0.0, "terms": out_terms,
                "degenerate": False, "samples": samples, "seed": seed}
    counts = np.zeros(len(terms), dtype=np.int64)
    sum_t = sum_t2 = 0
    for sh, sz in enumerate(_shard_sizes(samples, shards)):
        if sz == 0:
            continue
        shard_seed = seed if shards == 1 else _kernels.derive_seed(seed, sh)
        c, st, st2 = _run_kernel(patch, sint, sint, v, terms, (), p, sz, shard_seed)
        counts += c
        sum_t += int(st)
        sum_t2 += int(st2)
    for y, c in zip(term_ys, counts):
        mean = int(c) / samples
        out_terms[y] = MCEstimate(mean, math.sqrt(mean * (1 - mean) / samples),
                                  samples, seed)
    total = sum_t / samples
    var = max(sum_t2 / samples - total * total, 0.0)
    return {"total": total, "total_stderr": math.sqrt(var / samples),
            "terms": out_terms, "degenerate": False,
            "samples": samples, "seed": seed}


# ---------------------------------------------------------------------------
# Reference connectivity structures (python side, used for cross-checks)

class UnionFind:
    """Union by size with path halving; reset() is O(1) via epoch stamps."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.stamp = [-1] * n
        self.epoch = 0

    def reset(self):
        self.epoch += 1

    def _touch(self, x: int):
        if self.stamp[x] != self.epoch:
            self.stamp[x] = self.epoch
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x: int) -> int:
        self._touch(x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]

    def connected(self, x: int, y: int) -> bool:
        return self.find(x) == self.find(y)


def bfs_component(adjacency, allowed_open, start: int) -> set[int]:
    """Plain BFS reference used to validate the union-find kernel."""
    if not allowed_open(start):
        return set()
    seen = {start}
    queue = [start]
    while queue:
        u = queue.pop()
        for w in adjacency[u]:
            if w not in seen and allowed_open(w):
                seen.add(w)
                queue.append(w)
    return seen


def estimates_csv(rows) -> str:
    """CSV emit: event,p,samples,seed,mean,stderr."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["event", "p", "samples", "seed", "mean", "stderr"])
    for event, p, est in rows:
        w.writerow([event.describe(), repr(p), est.samples, est.seed,
                    repr(est.mean), repr(est.stderr)])
    return buf.getvalue()
