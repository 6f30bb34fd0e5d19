"""Exact event probabilities by enumeration over open/closed configurations.

Conventions (fixed across the package): a path is open iff every vertex on it
is open, endpoints included when they are real patch vertices; a ghost terminal
carries no state; "v connects to v" holds iff v is open.  All operations fail
loudly with SizeCapError rather than approximating — approximation lives in
monte_carlo.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ContractError, SizeCapError
from .graph_core import Patch, VertexSet, interior_of

DEFAULT_CAP = 24


@dataclass(frozen=True)
class Configuration:
    """One open/closed assignment; ghost entries are always 0."""

    patch: Patch
    states: np.ndarray  # uint8, one entry per graph vertex

    def __post_init__(self):
        st = np.asarray(self.states, dtype=np.uint8)
        if st.shape != (self.patch.graph.n,):
            raise ContractError("states length must equal vertex count")
        for gh in self.patch.ghosts:
            if st[gh]:
                raise ContractError("ghost vertices carry no state")
        object.__setattr__(self, "states", st)

    def with_open(self, y: int) -> "Configuration":
        st = self.states.copy()
        st[y] = 1
        return Configuration(self.patch, st)

    def with_closed(self, y: int) -> "Configuration":
        st = self.states.copy()
        st[y] = 0
        return Configuration(self.patch, st)


@dataclass(frozen=True)
class PhiReport:
    """Value of the boundary functional with per-boundary-vertex contributions."""

    p: float
    set: VertexSet
    center: int
    value: float
    contributions: dict = field(default_factory=dict)
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "center": self.center,
            "set_members": self.set.sorted_members(),
            "value": self.value,
            "degenerate": self.degenerate,
            "contributions": {str(y): v for y, v in sorted(self.contributions.items())},
        }


def _check_p(p: float):
    if not 0.0 <= p <= 1.0:
        raise ContractError(f"p={p} outside [0,1]")


class _Support:
    """Remap a set of graph vertices to dense local indices with mask adjacency."""

    def __init__(self, patch: Patch, vertices, removed_edges=None, cap=DEFAULT_CAP):
        self.order = sorted(vertices)
        if len(self.order) > cap:
            raise SizeCapError(
                f"support of {len(self.order)} vertices exceeds cap {cap}")
        if len(self.order) == 0:
            raise ContractError("empty support")
        self.local = {g: i for i, g in enumerate(self.order)}
        removed = set()
        if removed_edges:
            removed = {tuple(sorted(e)) for e in removed_edges}
        adj = np.zeros(len(self.order), dtype=np.uint64)
        gadj = patch.graph.adjacency
        for g, i in self.local.items():
            m = 0
            for w in gadj[g]:
                if w in self.local and tuple(sorted((g, w))) not in removed:
                    m |= 1 << self.local[w]
            adj[i] = m
        self.adj = adj

    def mask(self, vertices) -> np.uint64:
        m = 0
        for v in vertices:
            m |= 1 << self.local[v]
        return np.uint64(m)


def _enum(patch, support: _Support, src: int, path_vertices, terms, p: float):
    """Run the enumeration kernel; each term is (targets, req, ext) in global ids.

    ext entries are (state_vertex_or_None, neighbor_vertices): the cluster must
    touch one of the neighbors and the optional state vertex must be open.
    """
    k = len(support.order)
    path_mask = support.mask(path_vertices)
    nt = len(terms)
    target_masks = np.zeros(nt, dtype=np.uint64)
    req_masks = np.zeros(nt, dtype=np.uint64)
    ext_term, ext_bit, ext_nbr = [], [], []
    for t, (targets, req, ext) in enumerate(terms):
        target_masks[t] = support.mask(targets)
        req_masks[t] = support.mask(req)
        for state_v, nbrs in ext:
            ext_term.append(t)
            ext_bit.append(support.local[state_v] if state_v is not None else -1)
            ext_nbr.append(support.mask(nbrs))
    out = _kernels.enum_event_probs(
        k, support.adj, support.local[src], path_mask, target_masks, req_masks,
        np.asarray(ext_term, dtype=np.int64),
        np.asarray(ext_bit, dtype=np.int64),
        np.asarray(ext_nbr, dtype=np.uint64),
        float(p))
    return out


def _boundary_vertices(patch: Patch, members: frozenset[int]) -> list[int]:
    """Members of S with at least one neighbor (ghosts included) outside S."""
    g = patch.graph
    return sorted(y for y in members
                  if any(w not in members for w in g.adjacency[y]))


def conn_interior_prob(patch: Patch, s: VertexSet, v: int, y: int, p: float,
                       cap: int = DEFAULT_CAP) -> float:
    """P(v is joined to a neighbor of y through open interior vertices of s)."""
    _check_p(p)
    members = s.members
    if not members <= patch.non_ghosts:
        raise ContractError("s must consist of non-ghost vertices")
    sint = interior_of(patch.graph, members)
    if v not in sint:
        raise ContractError("v must lie in the interior of s")
    if y not in members:
        raise ContractError("y must lie in s")
    if all(w in members for w in patch.graph.adjacency[y]):
        raise ContractError("y has no neighbor outside s")
    targets = [w for w in patch.graph.adjacency[y] if w in sint]
    if not targets:
        return 0.0
    sup = _Support(patch, sint, cap=cap)
    return float(_enum(patch, sup, v, sint, [(targets, (), ())], p)[0])


def phi(patch: Patch, s: VertexSet, v: int, p: float,
        cap: int = DEFAULT_CAP) -> PhiReport:
    """The boundary functional: 1 when v is not interior, else the sum over
    boundary vertices y of P(v reaches a neighbor of y inside the interior)."""
    _check_p(p)
    members = s.members
    if v not in members:
        raise ContractError("v must lie in s")
    if not members <= patch.non_ghosts:
        raise ContractError("s must consist of non-ghost vertices")
    sint = interior_of(patch.graph, members)
    if v not in sint:
        return PhiReport(p=p, set=s, center=v, value=1.0, contributions={},
                         degenerate=True)
    ys = _boundary_vertices(patch, members)
    gadj = patch.graph.adjacency
    terms = []
    term_ys = []
    contributions = {}
    for y in ys:
        targets = [w for w in gadj[y] if w in sint]
        if targets:
            terms.append((targets, (), ()))
            term_ys.append(y)
        else:
            contributions[y] = 0.0
    if terms:
        sup = _Support(patch, sint, cap=cap)
        vals = _enum(patch, sup, v, sint, terms, p)
        for y, val in zip(term_ys, vals):
            contributions[y] = float(val)
    value = float(sum(contributions[y] for y in ys))
    return PhiReport(p=p, set=s, center=v, value=value,
                     contributions=contributions, degenerate=False)


def conn_frontier_prob(patch: Patch, v: int, p: float,
                       cap: int = DEFAULT_CAP) -> float:
    """P(an open path joins v to the ghost frontier)."""
    _check_p(p)
    if v in patch.ghosts:
        raise ContractError("v must be a non-ghost vertex")
    real = patch.non_ghosts
    targets = sorted(patch.frontier_adjacent)
    if not targets:
        return 0.0
    sup = _Support(patch, real, cap=cap)
    return float(_enum(patch, sup, v, real, [(targets, (), ())], p)[0])


def restricted_conn_prob(patch: Patch, a, u: int, b, p: float,
                         cap: int = DEFAULT_CAP) -> float:
    """P(u is joined to some vertex of b by an open path inside a).

    Path vertices (u included) must lie in a and be open.  A target outside a
    is reached by one final hop; its own state is required open iff it is a
    real patch vertex.
    """
    _check_p(p)
    a = frozenset(a)
    b = frozenset(b)
    if u not in a:
        raise ContractError("u must lie in a")
    if not a <= patch.non_ghosts:
        raise ContractError("a must consist of non-ghost vertices")
    if not b:
        return 0.0
    gadj = patch.graph.adjacency
    targets = sorted(b & a)
    ext = []
    for x in sorted(b - a):
        nbrs = [w for w in gadj[x] if w in a]
        if not nbrs:
            continue
        ext.append((x if x not in patch.ghosts else None, nbrs))
    if not targets and not ext:
        return 0.0
    support = set(a) | {sv for sv, _ in ext if sv is not None}
    sup = _Support(patch, support, cap=cap)
    return float(_enum(patch, sup, u, a, [(targets, (), ext)], p)[0])


def _popcounts(k: int) -> np.ndarray:
    idx = np.arange(1 << k, dtype=np.int64)
    pc = np.zeros(1 << k, dtype=np.int64)
    for i in range(k):
        pc += (idx >> i) & 1
    return pc


def pivotal_sum(patch: Patch, v: int, p: float, cap: int = DEFAULT_CAP) -> float:
    """Sum over vertices y of P(y is pivotal for the frontier connection of v)."""
    _check_p(p)
    if v in patch.ghosts:
        raise ContractError("v must be a non-ghost vertex")
    real = patch.non_ghosts
    if len(real) > cap - 1:
        raise SizeCapError(
            f"{len(real)} non-ghost vertices exceeds pivotal cap {cap - 1}")
    targets = sorted(patch.frontier_adjacent)
    if not targets:
        return 0.0
    sup = _Support(patch, real, cap=cap)
    k = len(sup.order)
    tbl = _kernels.enum_indicator_table(
        k, sup.adj, sup.local[v], sup.mask(real), sup.mask(targets)
    ).astype(bool)
    idx = np.arange(1 << k, dtype=np.int64)
    pc = _popcounts(k)
    total = 0.0
    for yi in range(k):
        bit = 1 << yi
        lo = idx[(idx & bit) == 0]
        piv = tbl[lo | bit] & ~tbl[lo]
        if not piv.any():
            continue
        npo = pc[lo[piv]]
        # weight over the other k-1 vertices; y's own state is irrelevant
        total += float(np.sum(p ** npo * (1.0 - p) ** (k - 1 - npo)))
    return total


def russo_check(patch: Patch, v: int, p: float, h: float = 1e-4,
                cap: int = DEFAULT_CAP) -> dict:
    """Central finite difference of the frontier probability vs the pivotal sum."""
    if h > 1e-2:
        raise ContractError("finite-difference step too large")
    if not (0.0 < p - h and p + h < 1.0):
        raise ContractError("p +/- h must stay inside (0,1)")
    f_hi = conn_frontier_prob(patch, v, p + h, cap=cap)
    f_lo = conn_frontier_prob(patch, v, p - h, cap=cap)
    lhs = (f_hi - f_lo) / (2.0 * h)
    rhs = pivotal_sum(patch, v, p, cap=cap)
    return {"lhs_fd": lhs, "rhs_pivotal": rhs, "gap": abs(lhs - rhs)}


def exhaustive_inf_phi(patch: Patch, v: int, p: float,
                       max_vertices: int = 12) -> dict:
    """Exact minimum of the boundary functional over all S containing v.

    Ties break toward the smallest set, then lexicographic member order.
    """
    _check_p(p)
    real = sorted(patch.non_ghosts)
    if v not in patch.non_ghosts:
        raise ContractError("v must be a non-ghost vertex")
    if len(real) > max_vertices:
        raise SizeCapError(
            f"{len(real)} non-ghost vertices exceeds subset cap {max_vertices}")
    others = [w for w in real if w != v]
    best = None
    for mask in range(1 << len(others)):
        members = {v} | {others[i] for i in range(len(others)) if mask >> i & 1}
        rep = phi(patch, VertexSet(members), v, p, cap=max_vertices)
        key = (rep.value, len(members), tuple(sorted(members)))
        if best is None or key < best[0]:
            best = (key, rep)
    return {"min_value": best[1].value, "argmin": best[1].set, "report": best[1]}


def l72_check(patch: Patch, v: int, p: float, h: float = 1e-4,
              tol: float = 1e-9, max_vertices: int = 12) -> dict:
    """Differential inequality: d/dp P(v<->frontier) against the phi infimum."""
    if p >= 1.0 - h:
        raise ContractError("p too close to 1 for the differential check")
    f_hi = conn_frontier_prob(patch, v, p + h)
    f_lo = conn_frontier_prob(patch, v, p - h)
    f_mid = conn_frontier_prob(patch, v, p)
    lhs = (f_hi - f_lo) / (2.0 * h)
    inf = exhaustive_inf_phi(patch, v, p, max_vertices=max_vertices)
    rhs = inf["min_value"] * (1.0 - f_mid) / (1.0 - p)
    return {"lhs": lhs, "rhs": rhs, "holds": lhs >= rhs - tol,
            "inf_phi": inf["min_value"], "argmin": inf["argmin"]}
