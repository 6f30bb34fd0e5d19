"""Finite graph patches with ghost frontiers, interiors, cutsets and generators.

A Patch is a finite truncation of an infinite graph: the ghost vertices stand
in for the exterior, and "reaches the frontier" means an open path ending at a
vertex adjacent to a ghost.  Ghost vertices never carry percolation state.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import ContractError

Edge = tuple[int, int]


def _norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices 0..n-1 with sorted adjacency lists."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    labels: tuple | None = None

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise ContractError("adjacency length does not match vertex count")
        for u, nbrs in enumerate(self.adjacency):
            if len(set(nbrs)) != len(nbrs):
                raise ContractError(f"duplicate neighbor entry at vertex {u}")
            for v in nbrs:
                if not 0 <= v < self.n:
                    raise ContractError(f"neighbor {v} out of range")
                if v == u:
                    raise ContractError(f"self-loop at vertex {u}")
                if u not in self.adjacency[v]:
                    raise ContractError(f"adjacency not symmetric at ({u},{v})")

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def edges(self) -> list[Edge]:
        return [(u, v) for u in range((self.n)) for v in self.adjacency[u] if u < v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]


def build_graph(edges: list[Edge], n: int, labels=None) -> Graph:
    """Build a Graph from an unordered edge list; rejects loops and duplicates."""
    adj: list[list[int]] = [[] for _ in range(n)]
    seen: set[Edge] = set()
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ContractError(f"edge endpoint out of range: ({u},{v})")
        if u == v:
            raise ContractError(f"self-loop rejected: ({u},{v})")
        e = _norm_edge(u, v)
        if e in seen:
            raise ContractError(f"duplicate edge rejected: {e}")
        seen.add(e)
        adj[u].append(v)
        adj[v].append(u)
    return Graph(n, tuple(tuple(sorted(a)) for a in adj),
                 tuple(labels) if labels is not None else None)


def interior_of(g: Graph, s: set[int] | frozenset[int]) -> frozenset[int]:
    """Vertices of s all of whose neighbors also lie in s."""
    for v in s:
        if not 0 <= v < g.n:
            raise ContractError(f"vertex {v} not in graph")
    return frozenset(v for v in s if all(w in s for w in g.adjacency[v]))


@dataclass(frozen=True)
class VertexSet:
    """A finite vertex set S; its interior depends on the ambient graph."""

    members: frozenset[int]

    def __init__(self, members):
        object.__setattr__(self, "members", frozenset(members))

    def interior(self, g: Graph) -> frozenset[int]:
        return interior_of(g, self.members)

    def sorted_members(self) -> list[int]:
        return sorted(self.members)


@dataclass(frozen=True)
class Patch:
    """Finite truncation: graph + root + ghost frontier.

    The root must be real, every ghost must touch a real vertex, and the real
    vertices must form one connected block containing the root.
    """

    graph: Graph
    root: int
    ghosts: frozenset[int] = field(default_factory=frozenset)

    def __init__(self, graph: Graph, root: int, ghosts):
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "ghosts", frozenset(ghosts))
        self._validate()

    def _validate(self):
        g, root, ghosts = self.graph, self.root, self.ghosts
        if not 0 <= root < g.n:
            raise ContractError("root out of range")
        if root in ghosts:
            raise ContractError("root may not be a ghost vertex")
        for gh in ghosts:
            if not 0 <= gh < g.n:
                raise ContractError("ghost vertex out of range")
            if not any(w not in ghosts for w in g.adjacency[gh]):
                raise ContractError(f"ghost {gh} has no non-ghost neighbor")
        real = self.non_ghosts
        seen = {root}
        dq = deque([root])
        while dq:
            u = dq.popleft()
            for w in g.adjacency[u]:
                if w in real and w not in seen:
                    seen.add(w)
                    dq.append(w)
        if seen != real:
            raise ContractError("non-ghost vertices not connected to the root")

    @property
    def non_ghosts(self) -> frozenset[int]:
        return frozenset(v for v in range(self.graph.n) if v not in self.ghosts)

    @property
    def frontier_adjacent(self) -> frozenset[int]:
        """Real vertices with at least one ghost neighbor."""
        return frozenset(
            v for v in self.non_ghosts
            if any(w in self.ghosts for w in self.graph.adjacency[v]))

    def label_index(self) -> dict:
        if self.graph.labels is None:
            return {}
        return {lab: i for i, lab in enumerate(self.graph.labels)}


@dataclass(frozen=True)
class VertexCutset:
    members: frozenset[int]

    def __init__(self, members):
        object.__setattr__(self, "members", frozenset(members))


@dataclass(frozen=True)
class EdgeCutset:
    members: frozenset[Edge]

    def __init__(self, members):
        object.__setattr__(self, "members", frozenset(_norm_edge(*e) for e in members))


def _reaches_ghost(patch: Patch, blocked_vertices=(), blocked_edges=(),
                   start: int | None = None) -> bool:
    """BFS from start (default root) avoiding blocked elements; True if a ghost
    is reached."""
    g = patch.graph
    blocked_v = set(blocked_vertices)
    blocked_e = {_norm_edge(*e) for e in blocked_edges}
    if start is None:
        start = patch.root
    if start in blocked_v:
        return False
    seen = {start}
    dq = deque([start])
    while dq:
        u = dq.popleft()
        for w in g.adjacency[u]:
            if w in seen or w in blocked_v:
                continue
            if _norm_edge(u, w) in blocked_e:
                continue
            if w in patch.ghosts:
                return True
            seen.add(w)
            dq.append(w)
    return False


def validate_vertex_cutset(patch: Patch, cut: VertexCutset) -> bool:
    """True iff removing the cut vertices disconnects root from every ghost.

    The root itself may belong to the cut; that counts as valid separation.
    """
    for v in cut.members:
        if not 0 <= v < patch.graph.n:
            raise ContractError(f"cut member {v} not a vertex")
    return not _reaches_ghost(patch, blocked_vertices=cut.members)


def validate_edge_cutset(patch: Patch, cut: EdgeCutset) -> bool:
    """True iff removing the cut edges disconnects root from every ghost."""
    for u, v in cut.members:
        if not patch.graph.has_edge(u, v):
            raise ContractError(f"cut member ({u},{v}) is not an edge of the graph")
    return not _reaches_ghost(patch, blocked_edges=cut.members)


# ---------------------------------------------------------------------------
# Generators.  Labels record coordinates; indices are dense for enumeration.

def gen_line(radius: int) -> Patch:
    """Path on coordinates -radius..radius; root at 0, ghosts at the two ends."""
    if radius < 1:
        raise ContractError("radius must be >= 1")
    coords = list(range(-radius, radius + 1))
    n = len(coords)
    edges = [(i, i + 1) for i in range(n - 1)]
    g = build_graph(edges, n, labels=coords)
    return Patch(g, root=radius, ghosts={0, n - 1})


def gen_grid2d(radius: int) -> Patch:
    """L-infinity ball of the square lattice; ghosts form the boundary ring.

    The four corner cells touch only other boundary cells, so they carry no
    information about the interior and are omitted.
    """
    if radius < 1:
        raise ContractError("radius must be >= 1")
    coords = [(x, y) for x in range(-radius, radius + 1)
              for y in range(-radius, radius + 1)
              if not (abs(x) == radius and abs(y) == radius)]
    index = {c: i for i, c in enumerate(coords)}
    edges = []
    for (x, y), i in index.items():
        for dx, dy in ((1, 0), (0, 1)):
            c2 = (x + dx, y + dy)
            if c2 in index:
                edges.append((i, index[c2]))
    g = build_graph(edges, len(coords), labels=coords)
    ghosts = {i for (x, y), i in index.items() if max(abs(x), abs(y)) == radius}
    return Patch(g, root=index[(0, 0)], ghosts=ghosts)


def gen_tree(branching: int, depth: int) -> Patch:
    """Regular rooted tree, every internal vertex has `branching` children.

    Vertices are indexed in level order; the leaves at the given depth are the
    ghost frontier.
    """
    if branching < 2:
        raise ContractError("branching must be >= 2")
    if depth < 1:
        raise ContractError("depth must be >= 1")
    edges = []
    level = [0]
    nxt = 1
    levels = [level]
    for _ in range(depth):
        new_level = []
        for u in level:
            for _ in range(branching):
                edges.append((u, nxt))
                new_level.append(nxt)
                nxt += 1
        level = new_level
        levels.append(level)
    g = build_graph(edges, nxt)
    return Patch(g, root=0, ghosts=set(levels[-1]))


# ---------------------------------------------------------------------------
# Line-oriented serialization: deterministic, byte-stable.

def patch_to_text(patch: Patch) -> str:
    lines = [f"n {patch.graph.n} root {patch.root}"]
    for gh in sorted(patch.ghosts):
        lines.append(f"g {gh}")
    for u, v in sorted(patch.graph.edges):
        lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


def patch_from_text(text: str) -> Patch:
    n = root = None
    ghosts: set[int] = set()
    edges: list[Edge] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "n":
            if len(parts) != 4 or parts[2] != "root":
                raise ContractError(f"bad header at line {lineno}")
            n, root = int(parts[1]), int(parts[3])
        elif parts[0] == "g":
            ghosts.add(int(parts[1]))
        elif parts[0] == "e":
            edges.append((int(parts[1]), int(parts[2])))
        else:
            raise ContractError(f"unknown record {parts[0]!r} at line {lineno}")
    if n is None or root is None:
        raise ContractError("missing header line")
    return Patch(build_graph(edges, n), root=root, ghosts=ghosts)
