"""Maximum-score path search for noisy spectra.

A scored path runs from ``x_0`` to ``y_0`` and uses at most one node of
each pair, so peaks that fit nowhere are simply skipped.  ``Q(i, j)`` is
the best total edge score of a left part ending at ``x_i`` and a right part
starting at ``y_j`` that together use at most one node per pair up to
``max(i, j)``.  Unreachable cells hold ``-inf``, which keeps reachability
apart from the value so zero and negative edge scores are fine.

With water edges an extra axis tracks the net water count ``c`` of the two
parts; states with ``|c| > 1`` are dropped and a finished path must net zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .dpsolver import FeasiblePath
from .ncgraph import EdgeType, NCSpectrumGraph

NODE_FLOOR = 0.1
WATER_PENALTY = 0.5

_TYPES = (EdgeType.PLAIN, EdgeType.PLUS_WATER, EdgeType.MINUS_WATER)
_TYPE_CODE = {t: n for n, t in enumerate(_TYPES)}


@dataclass(frozen=True)
class ScoreFunction:
    """Edge score ``node_reward[v] - penalty[type]``."""

    node_reward: tuple[float, ...]
    penalties: Mapping[EdgeType, float] = field(
        default_factory=lambda: {
            EdgeType.PLAIN: 0.0,
            EdgeType.PLUS_WATER: WATER_PENALTY,
            EdgeType.MINUS_WATER: WATER_PENALTY,
        }
    )

    def __call__(self, u: int, v: int, edge_type: EdgeType = EdgeType.PLAIN) -> float:
        return self.node_reward[v] - self.penalties[edge_type]


def default_score(
    g: NCSpectrumGraph,
    floor: float = NODE_FLOOR,
    plain_penalty: float = 0.0,
    water_penalty: float = WATER_PENALTY,
) -> ScoreFunction:
    """Reward each node by its pair's peak intensity relative to the strongest pair.

    Both nodes of a pair share the reward; auxiliary nodes and rewards below
    *floor* get *floor*.
    """
    levels = [nd.intensity for nd in g.nodes]
    top = max((lv for nd, lv in zip(g.nodes, levels) if nd.pair_index > 0), default=0.0)
    rewards = []
    for nd, lv in zip(g.nodes, levels):
        r = lv / top if nd.pair_index > 0 and top > 0 else 0.0
        rewards.append(max(floor, r))
    penalties = {
        EdgeType.PLAIN: plain_penalty,
        EdgeType.PLUS_WATER: water_penalty,
        EdgeType.MINUS_WATER: water_penalty,
    }
    return ScoreFunction(tuple(rewards), penalties)


def unit_score(g: NCSpectrumGraph) -> ScoreFunction:
    """Every edge scores 1."""
    return ScoreFunction((1.0,) * len(g.nodes), {t: 0.0 for t in _TYPES})


@dataclass(eq=False)
class QTable:
    """Best scores per state plus back-pointers.

    ``values[c, i, j]`` has ``c`` indexing the water balance ``c - 1`` when
    the table is water-aware, and a single layer otherwise.
    """

    k: int
    values: np.ndarray
    pred_side: np.ndarray  # 0 none, 1 came by an x-edge, 2 by a y-edge
    pred_idx: np.ndarray
    pred_layer: np.ndarray
    pred_type: np.ndarray

    @property
    def water(self) -> bool:
        return self.values.shape[0] == 3

    @property
    def zero_layer(self) -> int:
        return 1 if self.water else 0

    def reachable(self, i: int, j: int, c: int = 0) -> bool:
        return bool(np.isfinite(self.values[self.zero_layer + c, i, j]))

    def value(self, i: int, j: int, c: int = 0) -> float:
        return float(self.values[self.zero_layer + c, i, j])


@dataclass(frozen=True)
class ScoredPath:
    score: float
    path: FeasiblePath

    @property
    def nodes(self) -> tuple[int, ...]:
        return self.path.nodes

    @property
    def net_water(self) -> int:
        return sum(t.water_delta for _, _, t, _ in self.path.edges)


def _empty(k: int, layers: int) -> QTable:
    shape = (layers, k + 1, k + 1)
    values = np.full(shape, -np.inf)
    values[layers // 2, 0, 0] = 0.0
    return QTable(
        k,
        values,
        np.zeros(shape, dtype=np.int8),
        np.zeros(shape, dtype=np.int32),
        np.zeros(shape, dtype=np.int8),
        np.zeros(shape, dtype=np.int8),
    )


def _fill(g: NCSpectrumGraph, sf: ScoreFunction, water: bool) -> QTable:
    k = g.k
    layers = 3 if water else 1
    q = _empty(k, layers)
    Q = q.values
    allowed = _TYPES if water else (EdgeType.PLAIN,)

    def relax(dst, src, c_from, c_to, side, idx, code, gain):
        cand = Q[(c_from,) + src] + gain
        better = cand > Q[(c_to,) + dst]
        if not better.any():
            return
        sel = (c_to,) + dst
        Q[sel] = np.where(better, cand, Q[sel])
        q.pred_side[sel] = np.where(better, side, q.pred_side[sel])
        q.pred_idx[sel] = np.where(better, idx, q.pred_idx[sel])
        q.pred_layer[sel] = np.where(better, c_from, q.pred_layer[sel])
        q.pred_type[sel] = np.where(better, code, q.pred_type[sel])

    for t in range(1, k + 1):
        # left part grows by an edge (x_i, x_t): (i, j) -> (t, j) for j < t
        for i in g.x_in_all[t]:
            for e in g.edge_types(g.x(i), g.x(t)):
                if e not in allowed:
                    continue
                gain = sf(g.x(i), g.x(t), e)
                for c in range(layers):
                    c2 = c + (e.water_delta if water else 0)
                    if 0 <= c2 < layers:
                        relax((t, slice(0, t)), (i, slice(0, t)), c, c2, 1, i, _TYPE_CODE[e], gain)
        # right part grows by an edge (y_t, y_p): (i, p) -> (i, t) for i < t
        for p in g.y_out_all[t]:
            for e in g.edge_types(g.y(t), g.y(p)):
                if e not in allowed:
                    continue
                gain = sf(g.y(t), g.y(p), e)
                for c in range(layers):
                    c2 = c + (e.water_delta if water else 0)
                    if 0 <= c2 < layers:
                        relax((slice(0, t), t), (slice(0, t), p), c, c2, 2, p, _TYPE_CODE[e], gain)
    return q


def compute_q(g: NCSpectrumGraph, sf: ScoreFunction) -> QTable:
    """Best-score table over plain edges; O(|V| |E|) vector work."""
    return _fill(g, sf, water=False)


def compute_q_water(g: NCSpectrumGraph, sf: ScoreFunction) -> QTable:
    """Best-score table with a net-water axis ``c`` in {-1, 0, +1}."""
    return _fill(g, sf, water=True)


def _backtrack(g: NCSpectrumGraph, q: QTable, i: int, j: int, c: int, cross: EdgeType) -> FeasiblePath:
    xs, ys = [], []
    left_types, right_types = [], []
    while (i, j) != (0, 0):
        side = q.pred_side[c, i, j]
        idx = int(q.pred_idx[c, i, j])
        e = _TYPES[q.pred_type[c, i, j]]
        c = int(q.pred_layer[c, i, j])
        if side == 1:
            xs.append(i)
            left_types.append(e)
            i = idx
        elif side == 2:
            ys.append(j)
            right_types.append(e)
            j = idx
        else:  # pragma: no cover - guarded by reachability
            raise AssertionError("broken back-pointer chain")
    xs = [0] + xs[::-1]
    ys = ys + [0]
    nodes = [g.x(a) for a in xs] + [g.y(b) for b in ys]
    types = left_types[::-1] + [cross] + right_types
    return FeasiblePath.from_nodes(g, nodes, types)


def best_scored_path(g: NCSpectrumGraph, q: QTable, sf: ScoreFunction) -> ScoredPath | None:
    """Maximize ``Q(i, j) + s(x_i, y_j)`` over reachable states closed by a cross edge."""
    best = None
    for (u, v) in sorted(g.edges):
        if not g.is_x(u) or g.is_x(v):
            continue
        i, j = u, g.pair_of(v)
        for e in g.edge_types(u, v):
            if q.water:
                c = 1 - e.water_delta  # layer holding balance -delta
                if not 0 <= c < 3:
                    continue
            elif e is not EdgeType.PLAIN:
                continue
            else:
                c = 0
            base = q.values[c, i, j]
            if not np.isfinite(base):
                continue
            total = float(base) + sf(u, v, e)
            if best is None or total > best[0]:
                best = (total, i, j, c, e)
    if best is None:
        return None
    total, i, j, c, e = best
    return ScoredPath(total, _backtrack(g, q, i, j, c, e))


def solve_scored(g: NCSpectrumGraph, sf: ScoreFunction | None = None, water: bool = False) -> ScoredPath | None:
    sf = sf or default_score(g)
    q = compute_q_water(g, sf) if water else compute_q(g, sf)
    return best_scored_path(g, q, sf)
