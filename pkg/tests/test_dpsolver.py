import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import GA, spectrum_graph_sample, toy_graph
from ncseq.dpsolver import (
    FeasiblePath,
    compute_lce_dia,
    compute_m,
    compute_n,
    enumerate_solutions,
    expand_sequences,
    extract_solution,
    iter_solutions,
    m_entry,
    solve_exact,
)
from ncseq.ncgraph import EdgeType, NCSpectrumGraph, make_nodes
from ncseq.spectrum_io import Peak, Spectrum
from ncseq.testkit import oracle_paths, oracle_tables, random_graph


def table(m, k):
    return [[int(m.get(i, j)) for j in range(k + 1)] for i in range(k + 1)]


def chain_graph(k):
    """x_0 -> x_1 -> ... -> x_k -> y_0 and nothing else."""
    nodes = make_nodes([10 * (i + 1) for i in range(k)], 1000, 990)
    edges = {(i, i + 1): [EdgeType.PLAIN] for i in range(k)}
    edges[(k, 2 * k + 1)] = [EdgeType.PLAIN]
    return NCSpectrumGraph(nodes, edges, 1000)


def test_t1_tables(t1):
    m, n = compute_m(t1), compute_n(t1)
    assert (m.get(1, 0), m.get(0, 1), m.get(0, 0)) == (True, False, True)
    assert (n.get(1, 0), n.get(0, 1)) == (True, False)
    ld = compute_lce_dia(t1)
    assert ld.lce_x[0] == 1 and ld.lce_x[1] == 0
    assert ld.dia_x[1] and not ld.dia_y[1]
    assert m_entry(ld, 1, 0) and not m_entry(ld, 0, 1)
    with pytest.raises(IndexError):
        m_entry(ld, 2, 0)


def test_chain_run_lengths():
    ld = compute_lce_dia(chain_graph(5))
    assert ld.lce_x == (5, 4, 3, 2, 1, 0)
    # M(j, j-1) needs a way from y_{j-1} back to y_0, which only j = 1 has
    assert ld.dia_x == (True, True, False, False, False, False)
    assert extract_solution(chain_graph(5), ld).nodes == (0, 1, 2, 3, 4, 5, 11)
    assert table(ld, 5) == table(compute_m(chain_graph(5)), 5)


def test_t1_solution(t1):
    for m in (compute_m(t1), compute_lce_dia(t1)):
        sol = extract_solution(t1, m)
        assert sol.coordinates(t1) == [0, 71, 128]
        assert [lab for lab in (t1.nodes[p].label for p in sol.nodes)] == ["x0", "x1", "y0"]
        assert [e[3] for e in sol.edges] == [71, 57]


def test_t1_without_closing_edge(t1):
    g = t1.without_edges([(1, 3)])
    assert extract_solution(g, compute_lce_dia(g)) is None
    assert solve_exact(g) == []


def test_zero_peaks_solution():
    g = toy_graph(Spectrum(146.0, ()))
    [sol] = solve_exact(g, all_solutions=True)
    assert sol.nodes == (0, 1)
    assert expand_sequences(sol, g, GA, 0) == ["AG", "GA"]


def test_two_ions_enumeration():
    # AGA: b1 = 72 and b2 = 129; both readings G/A order give paths
    s = Spectrum(217.0, (Peak(72.0, 1.0), Peak(129.0, 1.0)))
    g = toy_graph(s)
    paths = enumerate_solutions(g, compute_lce_dia(g))
    assert {p.nodes for p in paths} == oracle_paths(g)
    assert len(enumerate_solutions(g, compute_lce_dia(g), limit=1)) == 1
    with pytest.raises(ValueError):
        enumerate_solutions(g, compute_lce_dia(g), limit=0)


def test_expand_sequences(t1):
    sol = extract_solution(t1, compute_lce_dia(t1))
    assert expand_sequences(sol, t1, GA, 0) == ["AG"]
    direct = FeasiblePath.from_nodes(t1, [0, 3])
    assert expand_sequences(direct, t1, GA, 0) == ["AG", "GA"]
    assert expand_sequences(direct, t1, GA, 0, limit=1) == ["AG"]


def test_solve_exact_modes(t1):
    assert solve_exact(t1) == solve_exact(t1, fast=False)
    assert len(solve_exact(t1, all_solutions=True)) == 1


def check_against_oracle(g):
    M, N = oracle_tables(g)
    k = g.k
    assert compute_m(g).tolist() == M
    assert compute_n(g).tolist() == N
    assert table(compute_lce_dia(g), k) == M
    want = oracle_paths(g)
    for m in (compute_m(g), compute_lce_dia(g)):
        got = [p.nodes for p in iter_solutions(g, m)]
        assert len(got) == len(set(got))
        assert set(got) == want
        sol = extract_solution(g, m)
        assert (sol is None) == (not want)


@given(st.integers(0, 10**9), st.integers(0, 7), st.sampled_from([0.2, 0.35, 0.6]))
@settings(max_examples=150)
def test_random_graphs_match_oracle(seed, k, p):
    check_against_oracle(random_graph(random.Random(seed), k, p))


@given(st.integers(0, 10**9))
@settings(max_examples=100)
def test_spectrum_graphs_match_oracle(seed):
    check_against_oracle(spectrum_graph_sample(seed))


@given(st.integers(0, 10**9), st.integers(1, 7))
def test_solutions_are_feasible(seed, k):
    g = random_graph(random.Random(seed), k, 0.5)
    for path in enumerate_solutions(g, compute_lce_dia(g), limit=50):
        assert path.nodes[0] == g.x(0) and path.nodes[-1] == g.y(0)
        pairs = sorted(g.pair_of(v) for v in path.nodes[1:-1])
        assert pairs == list(range(1, k + 1))
        assert all(g.has_edge(u, v) for u, v, _, _ in path.edges)
