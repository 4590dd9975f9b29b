import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wmslab import tanner

# ---------------------------------------------------------------------------
# independent oracles

def girth_oracle(graph):
    """Shortest cycle via networkx: for each edge, remove it and measure the
    shortest remaining path between its endpoints."""
    import networkx as nx
    G = nx.Graph()
    for i, nbrs in enumerate(graph.var_adj):
        for j in nbrs:
            G.add_edge(("v", i), ("c", j))
    best = math.inf
    for u, v in list(G.edges):
        G.remove_edge(u, v)
        try:
            best = min(best, nx.shortest_path_length(G, u, v) + 1)
        except nx.NetworkXNoPath:
            pass
        G.add_edge(u, v)
    return best


def rank_oracle(H):
    """GF(2) rank by plain python row elimination over integers-as-bitsets."""
    rows = [int("".join(str(int(b)) for b in r), 2) if len(r) else 0
            for r in np.asarray(H, dtype=np.uint8)]
    rank = 0
    for bit in range(np.asarray(H).shape[1] - 1, -1, -1) if len(rows) else []:
        mask = 1 << bit
        piv = next((k for k in range(rank, len(rows)) if rows[k] & mask), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for k in range(len(rows)):
            if k != rank and rows[k] & mask:
                rows[k] ^= rows[rank]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# from_dense_matrix

def test_smallest_check():
    g = tanner.from_dense_matrix([[1, 1]])
    assert (g.n, g.m) == (2, 1)
    assert set(g.edge_index) == {(0, 0), (1, 0)}


def test_benchmark_shape(bench12):
    assert (bench12.n, bench12.m) == (12, 9)
    assert (bench12.dv, bench12.dc) == (3, 4)
    assert bench12.num_edges == 36


def test_identity_matrix_is_11_regular():
    g = tanner.from_dense_matrix(np.eye(3, dtype=np.uint8))
    assert g.regular and (g.dv, g.dc) == (1, 1)


def test_empty_row_and_column_rejected():
    with pytest.raises(tanner.GraphError, match="row 1"):
        tanner.from_dense_matrix([[1, 1], [0, 0]])
    with pytest.raises(tanner.GraphError, match="column 1"):
        tanner.from_dense_matrix([[1, 0], [1, 0]])


# ---------------------------------------------------------------------------
# girth

def test_girth_four_cycle():
    g = tanner.from_dense_matrix([[1, 1], [1, 1]])
    assert tanner.girth(g) == 4


def test_girth_tree_is_infinite():
    g = tanner.from_dense_matrix([[1, 1, 0], [0, 1, 1]])
    assert tanner.girth(g) == math.inf


def test_girth_benchmark_matches_oracle(bench12):
    assert tanner.girth(bench12) == girth_oracle(bench12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_girth_matches_oracle_on_random_graphs(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(2, 7), rng.integers(3, 9)
    H = (rng.random((m, n)) < 0.5).astype(np.uint8)
    if not (H.sum(axis=0).all() and H.sum(axis=1).all()):
        return
    g = tanner.from_dense_matrix(H)
    assert tanner.girth(g) == girth_oracle(g)


# ---------------------------------------------------------------------------
# build_regular_graph

def test_build_small_feasible():
    g = tanner.build_regular_graph(6, 2, 3, girth_min=4, seed=7)
    assert (g.n, g.m, g.dv, g.dc) == (6, 4, 2, 3)
    assert tanner.girth(g) >= 4


def test_build_large_girth6():
    g = tanner.build_regular_graph(1000, 3, 6, girth_min=6, seed=1)
    assert tanner.girth(g) >= 6


def test_build_divisibility_error():
    with pytest.raises(tanner.GraphError, match="divisible"):
        tanner.build_regular_graph(5, 3, 6)


def test_build_deterministic():
    a = tanner.build_regular_graph(60, 3, 6, girth_min=6, seed=42)
    b = tanner.build_regular_graph(60, 3, 6, girth_min=6, seed=42)
    assert a == b


def test_build_girth_unreachable_reports_best():
    # a complete bipartite (2,2) graph is forced at n=2, dv=2, dc=2: girth 4
    with pytest.raises(tanner.ConstructionError) as exc:
        tanner.build_regular_graph(2, 2, 2, girth_min=6, seed=0)
    assert exc.value.best_girth == 4


# ---------------------------------------------------------------------------
# alist round trip

def test_alist_roundtrip_benchmark(bench12):
    assert tanner.parse_alist(tanner.write_alist(bench12)) == bench12


def test_alist_canonical_cycle():
    text = "2 2\n2 2\n2 2\n2 2\n1 2\n1 2\n1 2\n1 2\n"
    g = tanner.parse_alist(text)
    assert g.num_edges == 4 and tanner.girth(g) == 4


def test_alist_degree_mismatch_has_line_number():
    bad = "3 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 2\n"  # row says 3 vars, lists 2
    with pytest.raises(tanner.AlistError) as exc:
        tanner.parse_alist(bad)
    assert exc.value.line is not None


def test_alist_truncated_body():
    with pytest.raises(tanner.AlistError):
        tanner.parse_alist("2 1\n1 2\n1 1\n2\n1\n")


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_alist_roundtrip_random(seed):
    g = tanner.build_regular_graph(12, 2, 4, girth_min=4, seed=seed)
    assert tanner.parse_alist(tanner.write_alist(g)) == g


# ---------------------------------------------------------------------------
# GF(2) linear algebra

def test_nullspace_single_check():
    basis = tanner.gf2_nullspace([[1, 1]])
    assert len(basis) == 1 and basis[0].tolist() == [1, 1]
    cw = tanner.enumerate_codewords(tanner.from_dense_matrix([[1, 1]]))
    assert sorted(map(tuple, cw)) == [(0, 0), (1, 1)]


def test_nullspace_empty_constraints():
    basis = tanner.gf2_nullspace(np.zeros((0, 3), dtype=np.uint8))
    assert len(basis) == 3


def test_benchmark_codeword_count(bench12, bench12_codebook):
    H = bench12.parity_matrix()
    k = bench12.n - rank_oracle(H)
    assert tanner.gf2_rank(H) == rank_oracle(H)
    assert len(bench12_codebook) == 2 ** k
    assert len({tuple(c) for c in bench12_codebook}) == len(bench12_codebook)
    for c in bench12_codebook:
        assert bench12.is_codeword(c)


def test_enumeration_cap():
    H = np.zeros((0, 30), dtype=np.uint8)
    g = tanner.TannerGraph(n=2, m=1, var_adj=((0,), (0,)), chk_adj=((0, 1),))
    assert len(tanner.enumerate_codewords(g, cap=28)) == 2
    with pytest.raises(tanner.GraphError, match="cap"):
        tanner.enumerate_codewords(g, cap=0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_codeword_count_matches_rank_oracle(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 6), rng.integers(2, 10)
    H = (rng.random((m, n)) < 0.5).astype(np.uint8)
    if not (H.sum(axis=0).all() and H.sum(axis=1).all()):
        return
    g = tanner.from_dense_matrix(H)
    cw = tanner.enumerate_codewords(g)
    assert len(cw) == 2 ** (n - rank_oracle(H))
    assert all(g.is_codeword(c) for c in cw)


def test_adjacency_mutual_consistency_enforced():
    with pytest.raises(tanner.GraphError):
        tanner.TannerGraph(n=2, m=1, var_adj=((0,), ()), chk_adj=((0, 1),))
