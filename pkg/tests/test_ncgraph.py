import logging
import random

import pytest
from hypothesis import given, strategies as st

from conftest import GA, toy_graph
from ncseq.masskit import build_mass_array, default_table, discretize, is_residue_sum
from ncseq.ncgraph import EdgeType, GraphError, NCSpectrumGraph, build_graph, edge_query, make_nodes
from ncseq.spectrum_io import Peak, Spectrum
from ncseq.testkit import random_peptide, synthesize_spectrum


def plain_edges(g):
    return {(g.nodes[u].label, g.nodes[v].label): g.gap(u, v) for (u, v) in g.plain}


def test_t1_nodes(t1):
    assert [nd.coordinate for nd in t1.nodes] == [0, 71, 75, 128]
    assert [nd.label for nd in t1.nodes] == ["x0", "x1", "y1", "y0"]
    assert [nd.kind for nd in t1.nodes] == ["N", "N", "C", "C"]
    assert t1.k == 1


def test_t1_edges(t1):
    assert plain_edges(t1) == {("x0", "x1"): 71, ("x1", "y0"): 57, ("x0", "y0"): 128}
    assert not t1.has_edge(1, 2)


def test_edge_query(t1):
    x0, x1, y1, y0 = t1.nodes
    assert edge_query(t1, x0, x1) is EdgeType.PLAIN
    assert edge_query(t1, x1, x0) is None
    assert edge_query(t1, y1, y0) is None
    foreign = make_nodes([5], 100, 82)[1]
    with pytest.raises(GraphError):
        edge_query(t1, x0, foreign)


def test_zero_peaks():
    g = toy_graph(Spectrum(146.0, ()))
    assert g.k == 0
    assert [nd.coordinate for nd in g.nodes] == [0, 128]
    assert g.has_edge(0, 1)
    # 128 is not a sum of 57s
    only_g = type(GA)((("G", 57.0),), water=18.0, proton=1.0)
    assert not toy_graph(Spectrum(146.0, ()), only_g).has_edge(0, 1)


def test_parent_must_exceed_water():
    with pytest.raises(GraphError):
        toy_graph(Spectrum(18.0, ()))


def test_peaks_outside_window_dropped(caplog):
    s = Spectrum(146.0, (Peak(10.0, 1.0), Peak(72.0, 1.0), Peak(140.0, 1.0)))
    with caplog.at_level(logging.WARNING):
        g = toy_graph(s)
    assert g.k == 1
    assert caplog.text.count("dropping peak") == 2


def test_complements_merge_into_one_pair():
    # b1 and y1 of AG are two readings of one cleavage
    s = Spectrum(146.0, (Peak(72.0, 10.0), Peak(76.0, 30.0)))
    g = toy_graph(s)
    assert g.k == 1
    assert g.nodes[1].intensity == 40.0
    assert len(g.nodes[1].sources) == 2
    assert g.nodes[1].coordinate == 71


def test_water_edges():
    from ncseq.ncgraph import _scan_edges

    a = build_mass_array(GA, 400, 1.0)
    # x1 = 39 is G less a water, x2 = 75 is G plus a water
    nodes = make_nodes([39, 75], 300, 282)
    edges = _scan_edges(nodes, a, 0, 18)
    assert edges[(0, 1)] == (EdgeType.MINUS_WATER,)
    assert edges[(0, 2)] == (EdgeType.PLUS_WATER,)
    assert (1, 2) not in edges  # 36 fits nothing
    plain = _scan_edges(nodes, a, 0, None)
    assert all(t == (EdgeType.PLAIN,) for t in plain.values())
    assert (0, 1) not in plain


def test_pure_water_gap_is_plus_water():
    nodes = make_nodes([18], 300, 282)
    from ncseq.ncgraph import _scan_edges

    a = build_mass_array(GA, 400, 1.0)
    edges = _scan_edges(nodes, a, 0, 18)
    assert edges[(0, 1)] == (EdgeType.PLUS_WATER,)


def test_edge_type_water_delta():
    assert [t.water_delta for t in EdgeType] == [0, 1, -1]


def test_dump(t1):
    lines = t1.dump().splitlines()
    assert lines[:4] == ["node x0 coord=0", "node x1 coord=71", "node y1 coord=75", "node y0 coord=128"]
    assert "edge x0 x1 type=plain gap=71" in lines


def test_graph_validation():
    with pytest.raises(GraphError, match="not sorted"):
        NCSpectrumGraph(make_nodes([10, 20], 100, 82), {}, 100)
    nodes = make_nodes([10, 20], 100, 95)
    with pytest.raises(GraphError, match="one pair"):
        NCSpectrumGraph(nodes, {(1, 4): [EdgeType.PLAIN]}, 100)
    with pytest.raises(GraphError, match="rightwards"):
        NCSpectrumGraph(nodes, {(2, 1): [EdgeType.PLAIN]}, 100)
    with pytest.raises(GraphError, match="range"):
        NCSpectrumGraph(nodes, {(0, 9): [EdgeType.PLAIN]}, 100)
    with pytest.raises(GraphError):
        NCSpectrumGraph(nodes[:3], {}, 100)
    g = NCSpectrumGraph(nodes, {(0, 5): [EdgeType.PLAIN], (0, 1): []}, 100)
    assert g.has_edge(0, 5) and (0, 1) not in g.edges


def random_spectrum(seed):
    rng = random.Random(seed)
    rt = default_table()
    pep = random_peptide(rng, rt, rng.randint(3, 14))
    return synthesize_spectrum(pep, rt, noise_peaks=rng.randint(0, 4), seed=seed), rt


@given(st.integers(0, 10**6), st.sampled_from([0, 2, 50]))
def test_graph_invariants(seed, tol):
    s, rt = random_spectrum(seed)
    a = build_mass_array(rt, 40000, 0.01)
    g = build_graph(s, rt, a, tol)
    W = discretize(s.parent_mass, 0.01)
    water = discretize(rt.water, 0.01)
    assert len(g.nodes) == 2 * g.k + 2
    assert g.nodes[0].coordinate == 0 and g.nodes[-1].coordinate == W - water
    for j in range(1, g.k + 1):
        assert g.nodes[g.x(j)].pair_index == g.nodes[g.y(j)].pair_index == j
        assert g.coords[g.x(j)] + g.coords[g.y(j)] == W
        assert g.coords[g.x(j)] <= g.coords[g.y(j)]
    for (u, v) in g.edges:
        assert g.pair_of(u) != g.pair_of(v) or g.pair_of(u) == 0
        assert g.coords[v] > g.coords[u]
        assert is_residue_sum(a, g.gap(u, v), tol)


@given(st.integers(0, 10**6))
def test_edges_match_all_pairs_scan(seed):
    s, rt = random_spectrum(seed)
    a = build_mass_array(rt, 40000, 0.01)
    g = build_graph(s, rt, a, 50, water_edges=True)
    water = g.water_units
    want = {}
    n = len(g.nodes)
    for u in range(n):
        for v in range(u + 1, n):
            gap = g.gap(u, v)
            if g.pair_of(u) == g.pair_of(v) > 0 or not 0 < gap < a.h:
                continue
            types = []
            if is_residue_sum(a, gap, 50):
                types.append(EdgeType.PLAIN)
            if is_residue_sum(a, gap - water, 50) or abs(gap - water) <= 50:
                types.append(EdgeType.PLUS_WATER)
            if is_residue_sum(a, gap + water, 50):
                types.append(EdgeType.MINUS_WATER)
            if types:
                want[(u, v)] = tuple(types)
    assert g.edges == want


def test_derived_graphs(t1):
    g = t1.without_edges([(1, 3)])
    assert not g.has_edge(1, 3) and t1.has_edge(1, 3)
    h = g.with_edge(1, 3)
    assert h.edges == t1.edges
    assert g.num_edges == 2
