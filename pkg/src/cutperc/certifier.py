"""Certificates that a given p lies below the critical probability.

A certificate is a finite set S around a center vertex whose boundary
functional stays below 1 - epsilon0 at the given p.  grow_set searches for
such a set greedily; certify_bisect turns repeated searches into the largest
certifiable p on a family of patches of increasing radius.

Exact-mode certificates are rigorous for the finite patch; Monte Carlo mode
requires a 4-sigma margin below the threshold and is flagged non-rigorous.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import monte_carlo
from ._kernels import derive_seed
from .errors import ContractError
from .exact_engine import (conn_frontier_prob, exhaustive_inf_phi, phi,
                           restricted_conn_prob)
from .graph_core import Patch, VertexSet, interior_of

ENGINE_VERSION = "cutperc-0.1.0"

DEFAULT_EPSILON0 = 0.01
DEFAULT_EXACT_CAP = 16
DEFAULT_SEARCH_SAMPLES = 4_000


@dataclass(frozen=True)
class Certificate:
    p: float
    epsilon0: float
    center: int
    set: VertexSet
    phi_value: float
    method: str  # "exact" | "monte_carlo"
    samples: int = 0
    seed: int = 0
    sigma_margin: float = 0.0
    stderr: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.epsilon0 < 1.0:
            raise ContractError("epsilon0 must lie in (0,1)")
        bound = 1.0 - self.epsilon0
        if self.method == "exact":
            if self.phi_value > bound:
                raise ContractError("certificate value exceeds 1 - epsilon0")
        elif self.method == "monte_carlo":
            if self.phi_value + self.sigma_margin * self.stderr > bound:
                raise ContractError("monte carlo certificate lacks its margin")
        else:
            raise ContractError(f"unknown certificate method {self.method!r}")

    @property
    def rigorous(self) -> bool:
        return self.method == "exact"

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "epsilon0": self.epsilon0,
            "center": self.center,
            "set_members": self.set.sorted_members(),
            "phi_value": self.phi_value,
            "method": self.method,
            "samples": self.samples,
            "seed": self.seed,
            "sigma_margin": self.sigma_margin,
            "stderr": self.stderr,
            "engine_version": ENGINE_VERSION,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class NoCertificate:
    best_phi: float
    best_set: VertexSet | None
    reason: str


def _phi_estimate(patch, members, v, p, exact_cap, samples, seed):
    """(value, stderr, method) for the boundary functional of one set."""
    sint = interior_of(patch.graph, members)
    if len(sint) <= exact_cap:
        rep = phi(patch, VertexSet(members), v, p, cap=exact_cap)
        return rep.value, 0.0, "exact"
    rep = monte_carlo.mc_phi(patch, VertexSet(members), v, p, samples, seed=seed)
    return rep["total"], rep["total_stderr"], "monte_carlo"


def grow_set(patch: Patch, v: int, p: float, epsilon0: float = DEFAULT_EPSILON0,
             budget: int = 200, exact_cap: int = DEFAULT_EXACT_CAP,
             samples: int = monte_carlo.DEFAULT_SAMPLES,
             search_samples: int = DEFAULT_SEARCH_SAMPLES,
             seed: int = monte_carlo.DEFAULT_SEED,
             sigma_margin: float = monte_carlo.SIGMA_MARGIN):
    """Greedy search for a certificate set around v.

    Starts from the closed neighborhood and repeatedly adds the frontier
    vertex whose inclusion most decreases the boundary functional (ties to the
    lowest index).  Candidates that leave the interior unchanged only add
    their own boundary term, which is evaluated directly instead of
    recomputing the whole functional.
    """
    if not 0.0 < epsilon0 < 1.0:
        raise ContractError("epsilon0 must lie in (0,1)")
    if not 0.0 < p < 1.0:
        raise ContractError("p must lie in (0,1)")
    if v in patch.ghosts:
        raise ContractError("v must be a non-ghost vertex")
    gadj = patch.graph.adjacency
    nbrs = set(gadj[v])
    if nbrs & patch.ghosts:
        return NoCertificate(best_phi=1.0, best_set=None,
                             reason="center adjacent to the frontier")
    if budget < 1 + len(nbrs):
        raise ContractError("budget below the closed neighborhood size")
    members = {v} | nbrs
    bound = 1.0 - epsilon0
    best_phi, best_set = float("inf"), None
    step = 0
    while True:
        step += 1
        value, stderr, method = _phi_estimate(
            patch, members, v, p, exact_cap, search_samples,
            derive_seed(seed, 1, step))
        if value < best_phi:
            best_phi, best_set = value, VertexSet(members)
        if method == "exact" and value <= bound:
            return Certificate(p=p, epsilon0=epsilon0, center=v,
                               set=VertexSet(members), phi_value=value,
                               method="exact")
        if method == "monte_carlo" and value <= bound:
            # promising under search sampling: confirm at full sample count
            total, err, _ = _phi_estimate(
                patch, members, v, p, exact_cap, samples,
                derive_seed(seed, 2, step))
            if total + sigma_margin * err <= bound:
                return Certificate(p=p, epsilon0=epsilon0, center=v,
                                   set=VertexSet(members), phi_value=total,
                                   method="monte_carlo", samples=samples,
                                   seed=seed, sigma_margin=sigma_margin,
                                   stderr=err)
        if len(members) >= budget:
            return NoCertificate(best_phi=best_phi, best_set=best_set,
                                 reason="budget exhausted")
        candidates = sorted(
            {w for u in members for w in gadj[u]} - members - patch.ghosts)
        if not candidates:
            return NoCertificate(best_phi=best_phi, best_set=best_set,
                                 reason="patch exhausted")
        sint = interior_of(patch.graph, members)
        best_cand, best_est = None, None
        for c in candidates:
            grown = members | {c}
            sint_grown = interior_of(patch.graph, grown)
            if sint_grown == sint:
                targets = frozenset(w for w in gadj[c] if w in sint)
                if not targets:
                    est = value
                elif len(sint) <= exact_cap:
                    est = value + restricted_conn_prob(
                        patch, sint, v, targets, p, cap=exact_cap)
                else:
                    term = monte_carlo.mc_event_prob(
                        patch, monte_carlo.Restricted(v, frozenset(sint), targets),
                        p, search_samples, seed=derive_seed(seed, 3, step, c))
                    est = value + term.mean
            else:
                est, _, _ = _phi_estimate(
                    patch, grown, v, p, exact_cap, search_samples,
                    derive_seed(seed, 4, step, c))
            if best_est is None or est < best_est:
                best_cand, best_est = c, est
        members.add(best_cand)


def certify_bisect(patch_family, v: int | None, p_lo: float, p_hi: float,
                   tol: float = 1e-3, epsilon0: float = DEFAULT_EPSILON0,
                   budget: int = 200, radii=(2, 4, 8), **grow_kwargs) -> dict:
    """Largest certified p within tol by bisection over grow_set successes.

    patch_family maps a radius to a Patch; every radius in `radii` is tried in
    order at each probe, which makes the certified value monotone in the
    radius list.  The center defaults to each patch's root.
    """
    if not 0.0 < p_lo < p_hi < 1.0:
        raise ContractError("need 0 < p_lo < p_hi < 1")
    patches = {}

    def attempt(p):
        for r in radii:
            if r not in patches:
                patches[r] = patch_family(r)
            patch = patches[r]
            center = patch.root if v is None else v
            res = grow_set(patch, center, p, epsilon0=epsilon0, budget=budget,
                           **grow_kwargs)
            if isinstance(res, Certificate):
                return res
        return None

    cert = attempt(p_lo)
    if cert is None:
        raise ContractError(
            f"no certificate at p_lo={p_lo}: raise the budget or radii")
    hi_cert = attempt(p_hi)
    if hi_cert is not None:
        return {"certified_p": p_hi, "certificate": hi_cert}
    lo, hi = p_lo, p_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        c = attempt(mid)
        if c is not None:
            lo, cert = mid, c
        else:
            hi = mid
    return {"certified_p": lo, "certificate": cert}


def integrated_bound(p: float, p1: float, epsilon1: float) -> float:
    """The percolation lower bound 1 - ((1-p)/(1-p1))^(1-epsilon1)."""
    if not 0.0 < p1 <= p < 1.0:
        raise ContractError("need 0 < p1 <= p < 1")
    if not 0.0 <= epsilon1 < 1.0:
        raise ContractError("epsilon1 must lie in [0,1)")
    return 1.0 - ((1.0 - p) / (1.0 - p1)) ** (1.0 - epsilon1)


def check_integrated_bound(patch: Patch, w: int, p: float, p1: float,
                           epsilon1: float, grid_points: int = 5,
                           tol: float = 1e-9) -> dict:
    """Verify the integrated bound on a finite patch.

    Hypothesis: the exhaustive phi infimum at w stays above 1 - epsilon1 on a
    grid across [p1, p].  The finite patch only strengthens the conclusion,
    since the finite-volume connection probability dominates the infinite one.
    """
    if grid_points < 2:
        raise ContractError("need at least two grid points")
    grid = [p1 + (p - p1) * i / (grid_points - 1) for i in range(grid_points)]
    for pp in grid:
        inf = exhaustive_inf_phi(patch, w, pp)
        if inf["min_value"] < 1.0 - epsilon1 - 1e-12:
            return {"hypothesis_verified": False, "holds": None,
                    "failed_at_p": pp, "inf_phi": inf["min_value"],
                    "bound": None, "actual": None}
    bound = integrated_bound(p, p1, epsilon1)
    actual = conn_frontier_prob(patch, w, p)
    return {"hypothesis_verified": True, "bound": bound, "actual": actual,
            "holds": actual >= bound - tol, "failed_at_p": None}
