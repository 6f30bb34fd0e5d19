"""fan: construction invariants, closed forms against exhaustive enumeration,
level cuts, the per-level lower bounds, and the depth trends."""

import pytest

from cutperc.cutset_lab import cut_sum, enumerate_minimal_cutsets
from cutperc.errors import ContractError
from cutperc.exact_engine import restricted_conn_prob
from cutperc.fan import (black_conn_exact, endpoint_bound, fan_patch,
                         level_cut, level_cut_sum_exact, paper_bound,
                         pc_trend, separation_level, trend_csv, verify_csv,
                         verify_theorem34)
from cutperc.graph_core import EdgeCutset, validate_edge_cutset

TOL = 1e-12


# ---------------------------------------------------------------------------
# Construction

def test_fan_patch_counts():
    f1 = fan_patch(1)
    assert f1.patch.graph.n == 4  # 2 blacks + 1 white + ghost
    assert len([e for e in f1.patch.graph.edges
                if f1.ghost not in e]) == 2
    f2 = fan_patch(2)
    assert len(f2.blacks) == 3
    assert [len(lvl) for lvl in f2.whites] == [1, 2]
    f3 = fan_patch(3)
    assert f3.patch.graph.n == 4 + 7 + 1


def test_fan_adjacency_structure():
    f = fan_patch(3)
    g = f.patch.graph
    for n in range(1, 3):
        black = f.blacks[n]
        below = set(f.whites[n - 1])
        above = set(f.whites[n])
        assert set(g.adjacency[black]) == below | above
    for n, level in enumerate(f.whites):
        for w in level:
            assert set(g.adjacency[w]) == {f.blacks[n], f.blacks[n + 1]}


def test_fan_labels():
    f = fan_patch(2)
    labels = f.patch.graph.labels
    assert [labels[b] for b in f.blacks] == [(0, 0), (2, 0), (4, 0)]
    assert labels[f.whites[1][1]] == (3, 2)


def test_fan_patch_contracts():
    with pytest.raises(ContractError):
        fan_patch(0)
    with pytest.raises(ContractError):
        fan_patch(21)


# ---------------------------------------------------------------------------
# Closed forms

def test_black_conn_fixtures():
    assert abs(black_conn_exact(1, 0.5) - 0.125) <= TOL
    assert abs(black_conn_exact(2, 0.5) - 0.046875) <= TOL
    assert black_conn_exact(5, 1.0) == 1.0
    assert black_conn_exact(0, 0.3) == 0.3


def test_black_conn_matches_enumeration():
    for n in range(1, 5):
        f = fan_patch(n)
        for p in (0.3, 0.5, 0.8):
            got = restricted_conn_prob(f.patch, f.patch.non_ghosts,
                                       f.patch.root, {f.blacks[n]}, p)
            assert abs(got - black_conn_exact(n, p)) <= TOL


def test_level_cut_shape_and_validity():
    for N in (1, 2, 3):
        f = fan_patch(N)
        for n in range(1, N + 1):
            cut = level_cut(f, n)
            assert len(cut.members) == 2 ** (n - 1)
            assert validate_edge_cutset(f.patch, cut)
            for e in cut.members:
                assert f.blacks[n] in e
                other = e[0] if e[1] == f.blacks[n] else e[1]
                assert other in f.whites[n - 1]
    with pytest.raises(ContractError):
        level_cut(fan_patch(2), 3)


def test_level_cut_sum_fixtures():
    f2 = fan_patch(2)
    assert abs(level_cut_sum_exact(f2, 1, 0.5) - 0.125) <= TOL
    assert abs(level_cut_sum_exact(f2, 2, 0.5) - 0.0625) <= TOL
    assert abs(level_cut_sum_exact(f2, 2, 1.0) - 2.0) <= TOL


def test_level_cut_sum_matches_cutset_lab():
    for N in range(1, 5):
        f = fan_patch(N)
        for n in range(1, N + 1):
            for p in (0.3, 0.5, 0.8):
                rep = cut_sum(f.patch, f.patch.root, level_cut(f, n), p)
                assert abs(rep.total - level_cut_sum_exact(f, n, p)) <= TOL


# ---------------------------------------------------------------------------
# Bounds

def test_bound_formulas():
    assert abs(paper_bound(2, 0.8) - 1.024) <= TOL
    assert abs(paper_bound(1, 0.37) - 0.37) <= TOL
    assert abs(endpoint_bound(1, 0.5) - 0.125) <= TOL
    assert abs(endpoint_bound(2, 0.5) - 2 * 0.5 ** 5) <= TOL


def test_paper_bound_diverges_above_sqrt2_over_2():
    vals = [paper_bound(N, 0.75) for N in range(1, 41)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_separation_level():
    f = fan_patch(3)
    assert separation_level(f, level_cut(f, 2)) == 2
    # a non-separating edge set has no level
    assert separation_level(f, EdgeCutset({(f.blacks[0], f.whites[0][0])})) == 1


def test_level_cuts_are_tight_for_endpoint_bound():
    """The all-right-edges level cut meets the corrected bound exactly."""
    for N in (1, 2, 3):
        f = fan_patch(N)
        for p in (0.3, 0.6, 0.9):
            total = level_cut_sum_exact(f, N, p)
            assert total >= endpoint_bound(N, p) - TOL


def test_verify_theorem34_small():
    report = verify_theorem34(2, [0.5])
    assert report["N"] == 2
    assert report["num_cutsets"] == 6
    assert report["violations_endpoint"] == 0
    # the printed exponent is violated under both-endpoints-open accounting
    assert report["violations_quoted"] > 0
    for row in report["rows"]:
        assert row["margin_endpoint"] >= -1e-9


def test_verify_theorem34_zero_p():
    report = verify_theorem34(1, [0.0])
    for row in report["rows"]:
        assert row["cut_sum"] == 0.0 and row["bound_quoted"] == 0.0


def test_verify_excludes_ghost_edge():
    f = fan_patch(1)
    report = verify_theorem34(1, [0.5])
    for row in report["rows"]:
        assert all(f.ghost not in e for e in row["cut"])


def test_minimal_cutsets_on_fan_include_level_cuts():
    f = fan_patch(2)
    cuts = enumerate_minimal_cutsets(f.patch, f.patch.root, "edge",
                                     real_edges_only=True)
    members = {c.members for c in cuts}
    assert level_cut(f, 1).members in members
    assert level_cut(f, 2).members in members


# ---------------------------------------------------------------------------
# Trends

def test_pc_trend_decay():
    rows = pc_trend(0.9, range(1, 21))
    vals = [v for _, v in rows]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 0.1


def test_pc_trend_p_one():
    assert all(v == 1.0 for _, v in pc_trend(1.0, range(1, 6)))


def test_pc_trend_deep_decay():
    assert black_conn_exact(300, 0.99) < 0.05


def test_level_sums_increase_above_sqrt2_over_2():
    f = fan_patch(12)
    vals = [level_cut_sum_exact(f, n, 0.75) for n in range(2, 13)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


# ---------------------------------------------------------------------------
# CSV

def test_csv_emitters():
    rows = pc_trend(0.5, range(1, 4))
    text = trend_csv(rows)
    assert text.splitlines()[0] == "n,conn_prob"
    assert len(text.splitlines()) == 4
    report = verify_theorem34(1, [0.5])
    vtext = verify_csv(report)
    assert vtext.splitlines()[0].startswith("cut,level,p,cut_sum")
    assert len(vtext.splitlines()) == 1 + len(report["rows"])
