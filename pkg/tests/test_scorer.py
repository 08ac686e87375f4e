import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import spectrum_graph_sample, toy_graph
from ncseq.dpsolver import compute_lce_dia, extract_solution
from ncseq.ncgraph import EdgeType, NCSpectrumGraph, make_nodes
from ncseq.scorer import (
    ScoreFunction,
    best_scored_path,
    compute_q,
    compute_q_water,
    default_score,
    solve_scored,
    unit_score,
)
from ncseq.spectrum_io import Peak, Spectrum
from ncseq.testkit import oracle_best_score, oracle_q_values, random_graph

P, PW, MW = EdgeType.PLAIN, EdgeType.PLUS_WATER, EdgeType.MINUS_WATER


def random_score(g, rng, negative=False):
    lo = -1.0 if negative else 0.0
    rewards = tuple(rng.uniform(lo, 1.0) for _ in g.nodes)
    return ScoreFunction(rewards, {P: 0.0, PW: rng.uniform(0, 1), MW: rng.uniform(0, 1)})


def test_default_score_rewards():
    s = Spectrum(300.0, (Peak(72.0, 100.0), Peak(129.0, 50.0), Peak(200.0, 5.0)))
    g = toy_graph(s)
    sf = default_score(g)
    assert sf.node_reward[0] == 0.1 and sf.node_reward[-1] == 0.1
    by_level = {g.nodes[g.x(j)].intensity: j for j in range(1, 4)}
    strong, mid, weak = by_level[100.0], by_level[50.0], by_level[5.0]
    assert sf.node_reward[g.x(strong)] == sf.node_reward[g.y(strong)] == 1.0
    assert sf.node_reward[g.y(mid)] == 0.5
    assert sf.node_reward[g.x(weak)] == 0.1  # 0.05 raised to the floor
    assert sf(0, g.y(mid), PW) == 0.0


def test_t1_unit_score(t1):
    sf = unit_score(t1)
    q = compute_q(t1, sf)
    assert q.value(1, 0) == 1.0
    assert not q.reachable(0, 1)
    best = best_scored_path(t1, q, sf)
    assert best.score == 2.0
    assert best.nodes == (0, 1, 3)


def test_noise_peak_is_skipped():
    # AG with b1 plus a peak that fits no residue gap
    s = Spectrum(146.0, (Peak(72.0, 100.0), Peak(40.0, 100.0)))
    g = toy_graph(s)
    assert extract_solution(g, compute_lce_dia(g)) is None
    best = solve_scored(g)
    assert [int(g.coords[p]) for p in best.nodes] == [0, 71, 128]


def test_no_edges():
    g = NCSpectrumGraph(make_nodes([10], 100, 95), {}, 100)
    assert solve_scored(g) is None
    assert solve_scored(g, water=True) is None


def test_needs_a_cross_edge(t1):
    g = t1.without_edges([(0, 3), (1, 3)])
    assert compute_q(g, unit_score(g)).reachable(1, 0)
    assert solve_scored(g) is None


def check_scores(g, sf, water):
    q = compute_q_water(g, sf) if water else compute_q(g, sf)
    want = oracle_q_values(g, sf, water)
    layers = (-1, 0, 1) if water else (0,)
    for c in layers:
        for i in range(g.k + 1):
            for j in range(g.k + 1):
                got = q.value(i, j, c)
                if (c, i, j) in want:
                    assert got == pytest.approx(want[(c, i, j)])
                else:
                    assert got == -math.inf
    best = best_scored_path(g, q, sf)
    oracle = oracle_best_score(g, sf, water)
    if oracle is None:
        assert best is None
        return
    assert best.score == pytest.approx(oracle[0])
    kinds = tuple(e[2] for e in best.path.edges)
    assert (best.nodes, kinds) in oracle[1]
    assert best.net_water == 0


@given(st.integers(0, 10**9), st.integers(0, 6), st.booleans())
@settings(max_examples=150)
def test_plain_scores_match_oracle(seed, k, negative):
    rng = random.Random(seed)
    g = random_graph(rng, k, 0.4)
    check_scores(g, random_score(g, rng, negative), False)


@given(st.integers(0, 10**9), st.integers(0, 6), st.booleans())
@settings(max_examples=150)
def test_water_scores_match_oracle(seed, k, negative):
    rng = random.Random(seed)
    g = random_graph(rng, k, 0.35, water=True, p_water=0.25)
    check_scores(g, random_score(g, rng, negative), True)


@given(st.integers(0, 10**9))
@settings(max_examples=60)
def test_spectrum_graph_scores_match_oracle(seed):
    g = spectrum_graph_sample(seed, drop_edges=0.3)
    check_scores(g, default_score(g), False)


@given(st.integers(0, 10**9), st.integers(1, 7))
def test_unit_score_finds_a_path_whenever_one_exists(seed, k):
    g = random_graph(random.Random(seed), k, 0.45)
    feasible = extract_solution(g, compute_lce_dia(g))
    best = solve_scored(g, unit_score(g))
    if feasible is not None:
        # a feasible path is one candidate, so the optimum is at least as long
        assert best is not None and best.score >= k + 1


def water_pair(first, second):
    nodes = make_nodes([100], 500, 482)
    return NCSpectrumGraph(nodes, {(0, 1): [first], (1, 3): [second]}, 500, 1.0, 18)


def test_water_balance():
    g = water_pair(PW, MW)
    best = solve_scored(g, unit_score(g), water=True)
    assert best is not None and best.net_water == 0
    assert solve_scored(water_pair(PW, PW), water=True) is None
    assert solve_scored(water_pair(PW, MW), water=False) is None


@given(st.integers(0, 10**9), st.integers(0, 7))
def test_plain_graph_water_table_agrees(seed, k):
    rng = random.Random(seed)
    g = random_graph(rng, k, 0.4)
    sf = random_score(g, rng)
    plain, water = compute_q(g, sf), compute_q_water(g, sf)
    assert np.array_equal(plain.values[0], water.values[1])
    assert np.all(np.isneginf(water.values[0])) and np.all(np.isneginf(water.values[2]))
