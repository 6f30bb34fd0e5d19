"""The bipartite fan graph: closed forms, level cutsets and the edge-cut
counterexample checks.

Black vertices sit at (2n,0); between consecutive blacks there are 2^n
parallel white vertices, so every root-to-infinity connection must cross each
black vertex while the number of parallel routes doubles per level.  Site
percolation on it only percolates at p=1, yet edge-cut sums diverge once
p exceeds sqrt(2)/2.

Note on the lower bound: under the convention that both endpoints of a cut
edge must be open, the correct per-cut bound carries exponent 2N+1, not the
looser 2N-1 sometimes quoted (a single-edge cut at the first level already has
cut-sum p^2 < p).  verify_theorem34 reports margins against both exponents.
"""

from __future__ import annotations

import io
import csv

from dataclasses import dataclass

from .errors import ContractError
from .graph_core import EdgeCutset, Patch, build_graph
from . import cutset_lab


@dataclass(frozen=True)
class FanPatch:
    levels: int
    patch: Patch
    blacks: tuple[int, ...]          # blacks[n] is the vertex at (2n,0)
    whites: tuple[tuple[int, ...], ...]  # whites[n] lie between blacks n, n+1
    ghost: int


def fan_patch(N: int) -> FanPatch:
    """Fan truncated after black N, with a single ghost attached past (2N,0)."""
    if N < 1:
        raise ContractError("N must be >= 1")
    if N > 20:
        raise ContractError("N too large: 2^N white vertices")
    blacks = tuple(range(N + 1))
    labels: list[tuple[int, int]] = [(2 * n, 0) for n in range(N + 1)]
    whites = []
    edges = []
    nxt = N + 1
    for n in range(N):
        level = []
        for i in range(1, 2 ** n + 1):
            labels.append((2 * n + 1, i))
            edges.append((blacks[n], nxt))
            edges.append((nxt, blacks[n + 1]))
            level.append(nxt)
            nxt += 1
        whites.append(tuple(level))
    ghost = nxt
    labels.append((2 * N + 1, 0))
    edges.append((blacks[N], ghost))
    g = build_graph(edges, nxt + 1, labels=labels)
    patch = Patch(g, root=blacks[0], ghosts={ghost})
    return FanPatch(levels=N, patch=patch, blacks=blacks,
                    whites=tuple(whites), ghost=ghost)


def black_conn_exact(n: int, p: float) -> float:
    """P((0,0) <-> (2n,0)): all n+1 blacks open, one open white per level."""
    if n < 0:
        raise ContractError("n must be >= 0")
    if not 0.0 <= p <= 1.0:
        raise ContractError(f"p={p} outside [0,1]")
    out = p ** (n + 1)
    for k in range(n):
        out *= 1.0 - (1.0 - p) ** (2 ** k)
    return out


def level_cut(fan: FanPatch, n: int) -> EdgeCutset:
    """The 2^(n-1) edges from the whites of level n-1 into black n."""
    if not 1 <= n <= fan.levels:
        raise ContractError("level out of range")
    cut = EdgeCutset({(w, fan.blacks[n]) for w in fan.whites[n - 1]})
    return cut


def level_cut_sum_exact(fan: FanPatch, n: int, p: float) -> float:
    """Closed form for the cut-sum of level_cut(n); must match cutset_lab."""
    if not 1 <= n <= fan.levels:
        raise ContractError("level out of range")
    return 2 ** (n - 1) * p * p * black_conn_exact(n - 1, p)


def paper_bound(N: int, p: float) -> float:
    """The quoted lower bound 2^(N-1) p^(2N-1)."""
    if N < 1:
        raise ContractError("N must be >= 1")
    return 2 ** (N - 1) * p ** (2 * N - 1)


def endpoint_bound(N: int, p: float) -> float:
    """Lower bound with both-endpoints-open accounting: 2^(N-1) p^(2N+1)."""
    if N < 1:
        raise ContractError("N must be >= 1")
    return 2 ** (N - 1) * p ** (2 * N + 1)


def separation_level(fan: FanPatch, cut: EdgeCutset) -> int | None:
    """Smallest n >= 1 such that the cut separates (0,0) from (2n,0)."""
    reachable = _component_after_removal(fan, cut)
    for n in range(1, fan.levels + 1):
        if fan.blacks[n] not in reachable:
            return n
    return None


def _component_after_removal(fan: FanPatch, cut: EdgeCutset) -> set[int]:
    g = fan.patch.graph
    removed = cut.members
    seen = {fan.blacks[0]}
    stack = [fan.blacks[0]]
    while stack:
        u = stack.pop()
        for w in g.adjacency[u]:
            if w in seen:
                continue
            e = (u, w) if u < w else (w, u)
            if e in removed:
                continue
            seen.add(w)
            stack.append(w)
    return seen


def verify_theorem34(N: int, p_grid, tol: float = 1e-9) -> dict:
    """Check every minimal real-edge cutset against the level lower bounds.

    The single truncation edge into the ghost is not an edge of the infinite
    graph, so cutsets using it are excluded.  Margins are reported against both
    the quoted exponent (2N-1) and the endpoint-corrected one (2N+1).
    """
    fan = fan_patch(N)
    if len(fan.patch.graph.edges) > 21:
        raise ContractError("fan too large for exhaustive cutset enumeration")
    cuts = cutset_lab.enumerate_minimal_cutsets(
        fan.patch, fan.patch.root, "edge", cap_elements=21, real_edges_only=True)
    rows = []
    violations_quoted = 0
    violations_endpoint = 0
    for cut in cuts:
        n_cut = separation_level(fan, cut)
        if n_cut is None:
            raise ContractError("real-edge cutset fails to separate a black vertex")
        for p in p_grid:
            total = cutset_lab.cut_sum(fan.patch, fan.patch.root, cut, p).total
            bq = paper_bound(n_cut, p)
            be = endpoint_bound(n_cut, p)
            if total < bq - tol:
                violations_quoted += 1
            if total < be - tol:
                violations_endpoint += 1
            rows.append({
                "cut": sorted(cut.members),
                "level": n_cut,
                "p": p,
                "cut_sum": total,
                "bound_quoted": bq,
                "margin_quoted": total - bq,
                "bound_endpoint": be,
                "margin_endpoint": total - be,
            })
    return {
        "N": N,
        "num_cutsets": len(cuts),
        "rows": rows,
        "violations_quoted": violations_quoted,
        "violations_endpoint": violations_endpoint,
    }


def pc_trend(p: float, n_values) -> list[tuple[int, float]]:
    """Root-to-black connection probability against depth; decays for p < 1."""
    if not 0.0 <= p <= 1.0:
        raise ContractError(f"p={p} outside [0,1]")
    return [(n, black_conn_exact(n, p)) for n in n_values]


def trend_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "conn_prob"])
    for n, v in rows:
        w.writerow([n, repr(v)])
    return buf.getvalue()


def verify_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["cut", "level", "p", "cut_sum",
                "bound_quoted", "margin_quoted",
                "bound_endpoint", "margin_endpoint"])
    for r in report["rows"]:
        members = ";".join(f"{u}-{v}" for u, v in r["cut"])
        w.writerow([members, r["level"], repr(r["p"]), repr(r["cut_sum"]),
                    repr(r["bound_quoted"]), repr(r["margin_quoted"]),
                    repr(r["bound_endpoint"]), repr(r["margin_endpoint"])])
    return buf.getvalue()
