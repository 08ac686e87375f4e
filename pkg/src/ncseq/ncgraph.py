"""The NC-spectrum graph.

Every peak yields a complementary pair of nodes: the N-node reads the peak
as a b-ion (prefix mass ``w - proton``) and the C-node reads it as a y-ion
(prefix mass ``W - w + proton``).  Two auxiliary nodes stand for the empty
prefix (coordinate 0) and the full residue chain (``W - water``).

Nodes are kept in coordinate order ``x_0 .. x_k, y_k .. y_0``; ``x_i`` and
``y_i`` always belong to the same pair, and in code they live at array
positions ``i`` and ``2k + 1 - i``.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .masskit import MassArray, ResidueTable, discretize
from .spectrum_io import Peak, Spectrum

log = logging.getLogger(__name__)

_ROW_CHUNK = 256


class GraphError(ValueError):
    pass


class EdgeType(enum.Enum):
    PLAIN = "plain"
    PLUS_WATER = "plus-water"
    MINUS_WATER = "minus-water"

    @property
    def water_delta(self) -> int:
        return _WATER_DELTA[self]

    def __lt__(self, other):
        return _ORDER[self] < _ORDER[other]


_WATER_DELTA = {EdgeType.PLAIN: 0, EdgeType.PLUS_WATER: 1, EdgeType.MINUS_WATER: -1}
_ORDER = {EdgeType.PLAIN: 0, EdgeType.PLUS_WATER: 1, EdgeType.MINUS_WATER: 2}
# bit 0 plain, bit 1 plus-water, bit 2 minus-water
_BY_CODE = {
    code: tuple(t for bit, t in enumerate(EdgeType) if code >> bit & 1) for code in range(1, 8)
}


@dataclass(frozen=True)
class Node:
    position: int
    pair_index: int
    side: str  # "x" or "y"
    kind: str  # "N" or "C"
    coordinate: int
    sources: tuple[Peak, ...] = ()

    @property
    def label(self) -> str:
        return f"{self.side}{self.pair_index}"

    @property
    def intensity(self) -> float:
        return sum(p.intensity for p in self.sources)


class NCSpectrumGraph:
    """Immutable NC-spectrum graph over integer mass units.

    ``edges`` maps a position pair ``(u, v)`` to the tuple of edge types
    joining them.  Only plain edges take part in the exact solvers.
    """

    def __init__(
        self,
        nodes: Iterable[Node],
        edges: Mapping[tuple[int, int], Iterable[EdgeType]],
        parent_units: int,
        delta: float = 1.0,
        water_units: int = 0,
    ):
        self.nodes = tuple(nodes)
        n = len(self.nodes)
        if n < 2 or n % 2:
            raise GraphError(f"an NC-spectrum graph has 2k+2 nodes, got {n}")
        self.k = n // 2 - 1
        self.parent_units = parent_units
        self.delta = delta
        self.water_units = water_units
        for pos, node in enumerate(self.nodes):
            if node.position != pos or node.pair_index != self.pair_of(pos):
                raise GraphError(f"node {node} is out of place at position {pos}")
        self.coords = np.array([nd.coordinate for nd in self.nodes], dtype=np.int64)
        if np.any(np.diff(self.coords) < 0):
            raise GraphError("node coordinates are not sorted")

        self.edges: dict[tuple[int, int], tuple[EdgeType, ...]] = {}
        canon: dict[tuple, tuple[EdgeType, ...]] = {}
        for key, types in edges.items():
            types = tuple(types)
            norm = canon.get(types)
            if norm is None:
                norm = canon[types] = tuple(sorted(set(types)))
            if norm:
                self.edges[key] = norm
        self._validate_edges()
        self._index()

    def _validate_edges(self):
        n = len(self.nodes)
        arr = np.array(list(self.edges), dtype=np.int64).reshape(-1, 2)
        self._plain_mask = np.fromiter((t[0] is EdgeType.PLAIN for t in self.edges.values()), bool, len(arr))
        self._arr = arr
        u, v = arr[:, 0], arr[:, 1]
        bad = (u < 0) | (u >= n) | (v < 0) | (v >= n)
        if bad.any():
            e = arr[np.argmax(bad)]
            raise GraphError(f"edge ({e[0]}, {e[1]}) out of range")
        # the auxiliary pair comes from no peak, so x_0 -> y_0 is allowed
        same = (self._pairs(u) == self._pairs(v)) & (self._pairs(u) > 0)
        if same.any():
            e = arr[np.argmax(same)]
            raise GraphError(f"edge ({e[0]}, {e[1]}) joins the two nodes of one pair")
        back = self.coords[v] <= self.coords[u]
        if back.any():
            e = arr[np.argmax(back)]
            raise GraphError(f"edge ({e[0]}, {e[1]}) does not point rightwards")

    def _pairs(self, pos: np.ndarray) -> np.ndarray:
        return np.where(pos <= self.k, pos, 2 * self.k + 1 - pos)

    def _group(self, keys: np.ndarray, values: np.ndarray) -> list[list[int]]:
        """``out[t]`` lists the values whose key is t, ascending."""
        order = np.lexsort((values, keys))
        keys, values = keys[order], values[order]
        bounds = np.searchsorted(keys, np.arange(self.k + 2))
        return [values[bounds[t]:bounds[t + 1]].tolist() for t in range(self.k + 1)]

    def _index(self):
        k = self.k
        # plain edges: inside edges by pair index, cross edges as (i, j)
        arr = self._arr[self._plain_mask]
        u, v = arr[:, 0], arr[:, 1]
        self.plain: set[tuple[int, int]] = set(zip(u.tolist(), v.tolist()))
        xx = v <= k
        yy = u > k
        xy = ~xx & ~yy
        self.x_in = self._group(v[xx], u[xx])
        self.x_out = self._group(u[xx], v[xx])
        self.y_out = self._group(self._pairs(u[yy]), self._pairs(v[yy]))
        self.y_in = self._group(self._pairs(v[yy]), self._pairs(u[yy]))
        self.cross: set[tuple[int, int]] = set(zip(u[xy].tolist(), self._pairs(v[xy]).tolist()))
        # inside edges of any type, for the scored search
        u, v = self._arr[:, 0], self._arr[:, 1]
        del self._arr, self._plain_mask
        xx = v <= k
        yy = u > k
        self.x_in_all = self._group(v[xx], u[xx])
        self.y_out_all = self._group(self._pairs(u[yy]), self._pairs(v[yy]))
        self.x_next = [self.ex(i, i + 1) for i in range(k)] + [False]
        self.y_next = [False] + [self.ey(j, j - 1) for j in range(1, k + 1)]

    @cached_property
    def out_edges(self) -> list[list[tuple[int, EdgeType]]]:
        out: list[list[tuple[int, EdgeType]]] = [[] for _ in self.nodes]
        for (u, v) in sorted(self.edges):
            out[u].extend((v, t) for t in self.edges[(u, v)])
        return out

    @cached_property
    def in_edges(self) -> list[list[tuple[int, EdgeType]]]:
        out: list[list[tuple[int, EdgeType]]] = [[] for _ in self.nodes]
        for (u, v) in sorted(self.edges):
            out[v].extend((u, t) for t in self.edges[(u, v)])
        return out

    # positions <-> pair indices

    def x(self, i: int) -> int:
        return i

    def y(self, j: int) -> int:
        return 2 * self.k + 1 - j

    def pair_of(self, pos: int) -> int:
        return pos if pos <= self.k else 2 * self.k + 1 - pos

    def is_x(self, pos: int) -> bool:
        return pos <= self.k

    # edge predicates over plain edges

    def ex(self, i: int, j: int) -> bool:
        return (i, j) in self.plain

    def ey(self, j: int, p: int) -> bool:
        return (self.y(j), self.y(p)) in self.plain

    def ec(self, i: int, j: int) -> bool:
        return (i, j) in self.cross

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.plain

    def edge_types(self, u: int, v: int) -> tuple[EdgeType, ...]:
        return self.edges.get((u, v), ())

    def gap(self, u: int, v: int) -> int:
        return int(self.coords[v] - self.coords[u])

    @property
    def num_edges(self) -> int:
        return sum(len(t) for t in self.edges.values())

    # derived graphs

    def with_edge(self, u: int, v: int, edge_type: EdgeType = EdgeType.PLAIN) -> "NCSpectrumGraph":
        edges = dict(self.edges)
        edges[(u, v)] = tuple(edges.get((u, v), ())) + (edge_type,)
        return NCSpectrumGraph(self.nodes, edges, self.parent_units, self.delta, self.water_units)

    def without_edges(self, drop: Iterable[tuple[int, int]]) -> "NCSpectrumGraph":
        drop = set(drop)
        edges = {e: t for e, t in self.edges.items() if e not in drop}
        return NCSpectrumGraph(self.nodes, edges, self.parent_units, self.delta, self.water_units)

    def dump(self) -> str:
        lines = [f"node {nd.label} coord={nd.coordinate}" for nd in self.nodes]
        for (u, v), types in sorted(self.edges.items()):
            for t in types:
                lines.append(
                    f"edge {self.nodes[u].label} {self.nodes[v].label} "
                    f"type={t.value} gap={self.gap(u, v)}"
                )
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return f"NCSpectrumGraph(k={self.k}, edges={self.num_edges})"


def make_nodes(lowers: list[int], parent_units: int, chain_units: int, kinds=None, sources=None) -> list[Node]:
    """Lay out nodes for ion pairs given by their lower coordinates (ascending).

    The upper node of a pair sits at ``parent_units - lower``; the auxiliary
    pair sits at 0 and *chain_units*.
    """
    k = len(lowers)
    kinds = kinds or ["N"] * k
    sources = sources or [()] * k
    nodes = [Node(0, 0, "x", "N", 0)]
    for i, lo in enumerate(lowers, 1):
        nodes.append(Node(i, i, "x", kinds[i - 1], lo, sources[i - 1]))
    for i in range(k, 0, -1):
        other = "C" if kinds[i - 1] == "N" else "N"
        nodes.append(Node(2 * k + 1 - i, i, "y", other, parent_units - lowers[i - 1], sources[i - 1]))
    nodes.append(Node(2 * k + 1, 0, "y", "C", chain_units))
    return nodes


def _ion_pairs(s: Spectrum, rt: ResidueTable, delta: float, tol: int, W: int, water: int):
    """Discretize peaks into (lower coordinate, kind of lower node, sources) pairs."""
    by_n: dict[int, Peak] = {}
    for p in s.peaks:
        prefix = p.mass - rt.proton
        n_units = discretize(prefix, delta) if prefix > 0 else 0
        if not water < n_units < W - water:
            log.warning("dropping peak %.4f: outside the (water, W - water) window", p.mass)
            continue
        kept = by_n.get(n_units)
        if kept is None or p.intensity > kept.intensity:
            by_n[n_units] = p
    raw = []
    for n_units, peak in by_n.items():
        c_units = W - n_units
        if n_units <= c_units:
            raw.append((n_units, "N", peak))
        else:
            raw.append((c_units, "C", peak))
    raw.sort(key=lambda r: (r[0], -r[2].intensity))

    # complementary (or repeated) readings of one ion: merge within tolerance
    groups: list[list[tuple[int, str, Peak]]] = []
    for item in raw:
        if groups and item[0] - groups[-1][0][0] <= tol:
            groups[-1].append(item)
        else:
            groups.append([item])
    pairs = []
    for g in groups:
        rep = max(g, key=lambda r: r[2].intensity)
        pairs.append((rep[0], rep[1], tuple(r[2] for r in g)))
    return pairs


def build_graph(
    s: Spectrum,
    rt: ResidueTable,
    a: MassArray,
    tol: int,
    water_edges: bool = False,
) -> NCSpectrumGraph:
    """Build the NC-spectrum graph of a preprocessed spectrum.

    Every ordered node pair with ``0 < gap < h`` is tested against the mass
    array, except the two nodes of one ion pair.  With *water_edges*, gaps one water
    above or below a residue sum (or exactly one water) get typed edges.
    """
    delta = a.delta
    water = discretize(rt.water, delta)
    if s.parent_mass <= rt.water:
        raise GraphError(f"parent mass {s.parent_mass} does not exceed the water mass")
    W = discretize(s.parent_mass, delta)
    chain = W - water
    pairs = _ion_pairs(s, rt, delta, tol, W, water)
    nodes = make_nodes(
        [p[0] for p in pairs], W, chain, [p[1] for p in pairs], [p[2] for p in pairs]
    )
    edges = _scan_edges(nodes, a, tol, water if water_edges else None)
    return NCSpectrumGraph(nodes, edges, W, delta, water)


def _scan_edges(nodes, a: MassArray, tol: int, water: int | None):
    n = len(nodes)
    k = n // 2 - 1
    coords = np.array([nd.coordinate for nd in nodes], dtype=np.int64)
    pos = np.arange(n)
    pair = np.where(pos <= k, pos, 2 * k + 1 - pos)
    h = a.h
    edges: dict[tuple[int, int], tuple[EdgeType, ...]] = {}
    for r0 in range(0, n - 1, _ROW_CHUNK):
        r1 = min(r0 + _ROW_CHUNK, n - 1)
        rows = slice(r0, r1)
        cols = slice(r0 + 1, n)
        gap = coords[None, cols] - coords[rows, None]
        pr, pc = pair[rows, None], pair[None, cols]
        ok = (gap > 0) & (gap < h) & ((pr != pc) | (pr == 0))
        ri, ci = np.nonzero(ok)
        if not len(ri):
            continue
        g = gap[ri, ci]
        u = ri + r0
        v = ci + r0 + 1
        code = a.hits(g, tol).astype(np.int8)
        if water is not None:
            plus = a.hits(g - water, tol) | (np.abs(g - water) <= tol)
            code |= plus.astype(np.int8) << 1
            code |= a.hits(g + water, tol).astype(np.int8) << 2
        keep = code > 0
        for uu, vv, cc in zip(u[keep].tolist(), v[keep].tolist(), code[keep].tolist()):
            edges[(uu, vv)] = _BY_CODE[cc]
    return edges


def edge_query(g: NCSpectrumGraph, src: Node, dst: Node) -> EdgeType | None:
    """The type of the edge from *src* to *dst* (plain preferred), or None."""
    for nd in (src, dst):
        if not 0 <= nd.position < len(g.nodes) or g.nodes[nd.position] != nd:
            raise GraphError(f"node {nd} does not belong to this graph")
    types = g.edge_types(src.position, dst.position)
    return types[0] if types else None
