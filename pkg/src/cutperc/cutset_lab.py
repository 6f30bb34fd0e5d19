"""Cutset event probabilities, cut sums, and infima over cutset families.

The cut-sum of a cutset is the quantity whose infimum over all cutsets defines
the vertex- and edge-cut thresholds; at desk scale the infimum is taken
exhaustively over inclusion-minimal cutsets, at larger scale over a structured
family supplied by the caller.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass, field
from itertools import combinations

from . import monte_carlo
from .errors import ContractError, SizeCapError
from .exact_engine import DEFAULT_CAP, _Support, _enum
from .graph_core import (EdgeCutset, Patch, VertexCutset, _norm_edge,
                         _reaches_ghost, validate_edge_cutset,
                         validate_vertex_cutset)


@dataclass(frozen=True)
class CutSumReport:
    kind: str  # "vertex" | "edge"
    cut: object
    p: float
    terms: dict = field(default_factory=dict)
    total: float = 0.0
    method: str = "exact"
    total_stderr: float = 0.0

    def sorted_elements(self):
        return sorted(self.cut.members)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "p": self.p,
            "cut_members": [list(e) if isinstance(e, tuple) else e
                            for e in self.sorted_elements()],
            "terms": {str(k): v for k, v in sorted(self.terms.items())},
            "total": self.total,
            "method": self.method,
            "total_stderr": self.total_stderr,
        }


def vertex_cut_event_prob(patch: Patch, x: int, v: int, cut: VertexCutset,
                          p: float, cap: int = DEFAULT_CAP) -> float:
    """P(open path x -> v avoiding the other cut vertices); v itself open."""
    if not validate_vertex_cutset(patch, cut):
        raise ContractError("invalid vertex cutset")
    if v not in cut.members:
        raise ContractError("v must be a cut member")
    if x in patch.ghosts:
        raise ContractError("x must be a non-ghost vertex")
    support = patch.non_ghosts - (cut.members - {v})
    if x not in support:
        return 0.0  # x is itself an avoided cut member
    sup = _Support(patch, support, cap=cap)
    return float(_enum(patch, sup, x, support, [([v], (), ())], p)[0])


def edge_cut_event_prob(patch: Patch, x: int, e, cut: EdgeCutset, p: float,
                        cap: int = DEFAULT_CAP) -> float:
    """P(x reaches an endpoint of e avoiding the other cut edges, both real
    endpoints of e open)."""
    if not validate_edge_cutset(patch, cut):
        raise ContractError("invalid edge cutset")
    e = _norm_edge(*e)
    if e not in cut.members:
        raise ContractError("e must be a cut member")
    if x in patch.ghosts:
        raise ContractError("x must be a non-ghost vertex")
    removed = cut.members - {e}
    real = patch.non_ghosts
    targets = [w for w in e if w not in patch.ghosts]
    ext = []
    for w in e:
        if w in patch.ghosts:
            nbrs = [z for z in patch.graph.adjacency[w]
                    if z not in patch.ghosts and _norm_edge(w, z) not in removed]
            ext.append((None, nbrs))
    sup = _Support(patch, real, removed_edges=removed, cap=cap)
    return float(_enum(patch, sup, x, real, [(targets, tuple(targets), ext)], p)[0])


def cut_sum(patch: Patch, x: int, cut, p: float, cap: int = DEFAULT_CAP,
            samples: int = monte_carlo.DEFAULT_SAMPLES,
            seed: int = monte_carlo.DEFAULT_SEED) -> CutSumReport:
    """Sum of per-member event probabilities, exact when the cap allows.

    Beyond the cap each term is estimated by Monte Carlo and stderrs are
    combined in quadrature (terms are positively correlated, so the combined
    figure is indicative, not a confidence bound).
    """
    if isinstance(cut, VertexCutset):
        kind = "vertex"
        elements = sorted(cut.members)
    elif isinstance(cut, EdgeCutset):
        kind = "edge"
        elements = sorted(cut.members)
    else:
        raise ContractError("cut must be a VertexCutset or EdgeCutset")
    exact = len(patch.non_ghosts) <= cap
    terms = {}
    total = 0.0
    var = 0.0
    for i, el in enumerate(elements):
        if exact:
            if kind == "vertex":
                val = vertex_cut_event_prob(patch, x, el, cut, p, cap=cap)
            else:
                val = edge_cut_event_prob(patch, x, el, cut, p, cap=cap)
        else:
            if kind == "vertex":
                event = monte_carlo.VertexCutEvent(x, el, cut)
            else:
                event = monte_carlo.EdgeCutEvent(x, el, cut)
            est = monte_carlo.mc_event_prob(
                patch, event, p, samples,
                seed=monte_carlo._kernels.derive_seed(seed, i))
            val = est.mean
            var += est.stderr ** 2
        terms[el] = val
        total += val
    return CutSumReport(kind=kind, cut=cut, p=p, terms=terms, total=total,
                        method="exact" if exact else "monte_carlo",
                        total_stderr=var ** 0.5)


def _cut_valid(patch: Patch, x: int, kind: str, members) -> bool:
    if kind == "vertex":
        return not _reaches_ghost(patch, blocked_vertices=members, start=x)
    return not _reaches_ghost(patch, blocked_edges=members, start=x)


def enumerate_minimal_cutsets(patch: Patch, x: int, kind: str,
                              cap_elements: int = 20,
                              real_edges_only: bool = False) -> list:
    """All inclusion-minimal cutsets separating x from the ghost frontier.

    Exhaustive by subset size with superset pruning, so every surviving valid
    set is minimal.  Deterministic (size, then lexicographic) output order.
    """
    if x in patch.ghosts:
        raise ContractError("x must be a non-ghost vertex")
    if kind == "vertex":
        elements = sorted(patch.non_ghosts)
    elif kind == "edge":
        elements = sorted(
            e for e in patch.graph.edges
            if not (e[0] in patch.ghosts and e[1] in patch.ghosts)
            and not (real_edges_only
                     and (e[0] in patch.ghosts or e[1] in patch.ghosts)))
    else:
        raise ContractError(f"unknown cutset kind {kind!r}")
    if len(elements) > cap_elements:
        raise SizeCapError(
            f"{len(elements)} candidate elements exceeds cap {cap_elements}")
    found: list[frozenset] = []
    for size in range(1, len(elements) + 1):
        for combo in combinations(elements, size):
            cand = frozenset(combo)
            if any(m <= cand for m in found):
                continue
            if _cut_valid(patch, x, kind, cand):
                found.append(cand)
    ctor = VertexCutset if kind == "vertex" else EdgeCutset
    return [ctor(m) for m in sorted(found, key=lambda m: (len(m), sorted(m)))]


def inf_cut_sum(patch: Patch, x: int, kind: str, p: float, family="enumerated",
                cap: int = DEFAULT_CAP, cap_elements: int = 20) -> dict:
    """Minimum cut-sum over a family of cutsets; the finite-patch surrogate of
    the infimum in the threshold definitions."""
    if family == "enumerated":
        cuts = enumerate_minimal_cutsets(patch, x, kind,
                                         cap_elements=cap_elements)
        family_name = "enumerated"
    else:
        cuts = list(family)
        family_name = "explicit"
    if not cuts:
        raise ContractError("empty cutset family")
    best = None
    for cut in cuts:
        rep = cut_sum(patch, x, cut, p, cap=cap)
        if best is None or rep.total < best.total:
            best = rep
    return {"min_total": best.total, "argmin_cut": best.cut,
            "family": family_name, "report": best}


def cut_sums_csv(reports) -> str:
    """CSV emit: kind,p,cut_members,total."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "p", "cut_members", "total"])
    for rep in reports:
        members = ";".join(
            f"{e[0]}-{e[1]}" if isinstance(e, tuple) else str(e)
            for e in rep.sorted_elements())
        w.writerow([rep.kind, repr(rep.p), members, repr(rep.total)])
    return buf.getvalue()
