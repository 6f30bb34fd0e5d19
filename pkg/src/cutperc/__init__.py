"""cutperc: percolation-threshold functionals, certificates and cutset sums.

Exact enumeration on small patches, seeded Monte Carlo beyond, greedy
certificate search with bisection, cutset laboratories, and the fan-graph
family where the site and edge-cut thresholds separate.
"""

from .certifier import (Certificate, NoCertificate, certify_bisect,
                        check_integrated_bound, grow_set, integrated_bound)
from .cutset_lab import (CutSumReport, cut_sum, cut_sums_csv,
                         edge_cut_event_prob, enumerate_minimal_cutsets,
                         inf_cut_sum, vertex_cut_event_prob)
from .errors import ContractError, SizeCapError
from .exact_engine import (Configuration, PhiReport, conn_frontier_prob,
                           conn_interior_prob, exhaustive_inf_phi, l72_check,
                           phi, pivotal_sum, restricted_conn_prob, russo_check)
from .fan import (FanPatch, black_conn_exact, endpoint_bound, fan_patch,
                  level_cut, level_cut_sum_exact, paper_bound, pc_trend,
                  separation_level, verify_theorem34)
from .graph_core import (EdgeCutset, Graph, Patch, VertexCutset, VertexSet,
                         build_graph, gen_grid2d, gen_line, gen_tree,
                         interior_of, patch_from_text, patch_to_text,
                         validate_edge_cutset, validate_vertex_cutset)
from .monte_carlo import (MCEstimate, estimates_csv, mc_event_prob, mc_phi,
                          sample_config, SampleStream)

__version__ = "0.1.0"
ENGINE_VERSION = f"cutperc-{__version__}"

__all__ = [
    "Certificate", "NoCertificate", "certify_bisect", "check_integrated_bound",
    "grow_set", "integrated_bound",
    "CutSumReport", "cut_sum", "cut_sums_csv", "edge_cut_event_prob",
    "enumerate_minimal_cutsets", "inf_cut_sum", "vertex_cut_event_prob",
    "ContractError", "SizeCapError",
    "Configuration", "PhiReport", "conn_frontier_prob", "conn_interior_prob",
    "exhaustive_inf_phi", "l72_check", "phi", "pivotal_sum",
    "restricted_conn_prob", "russo_check",
    "FanPatch", "black_conn_exact", "endpoint_bound", "fan_patch", "level_cut",
    "level_cut_sum_exact", "paper_bound", "pc_trend", "separation_level",
    "verify_theorem34",
    "EdgeCutset", "Graph", "Patch", "VertexCutset", "VertexSet", "build_graph",
    "gen_grid2d", "gen_line", "gen_tree", "interior_of", "patch_from_text",
    "patch_to_text", "validate_edge_cutset", "validate_vertex_cutset",
    "MCEstimate", "estimates_csv", "mc_event_prob", "mc_phi", "sample_config",
    "SampleStream",
    "__version__", "ENGINE_VERSION",
]
