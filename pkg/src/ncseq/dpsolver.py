"""Exact feasible-path search over an NC-spectrum graph.

A feasible path runs from ``x_0`` to ``y_0`` and uses exactly one node of
every pair.  Because all x-nodes lie left of all y-nodes, such a path is a
left part ``L`` (x-nodes), one cross edge, and a right part ``R`` (y-nodes).

``M(i, j)`` says whether ``L`` can end at ``x_i`` while ``R`` starts at
``y_j`` with every pair up to ``max(i, j)`` covered once.  ``N(i, j)`` says
whether a single path from ``x_i`` to ``y_j`` covers every pair from
``min(i, j)`` to ``k`` once.  Only plain edges are used here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Protocol

from .masskit import ResidueTable, decompose_gap, multiset_orderings
from .ncgraph import EdgeType, NCSpectrumGraph

# per-level cap when expanding sequences of one total length
_LEVEL_CAP = 200_000


class MAccess(Protocol):
    k: int

    def get(self, i: int, j: int) -> bool: ...


class BoolTable:
    """(k+1) x (k+1) boolean table stored as one bytearray per row."""

    def __init__(self, k: int):
        self.k = k
        self.rows = [bytearray(k + 1) for _ in range(k + 1)]

    def get(self, i: int, j: int) -> bool:
        return bool(self.rows[i][j])

    __call__ = get

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __eq__(self, other):
        if isinstance(other, BoolTable):
            return self.rows == other.rows
        return NotImplemented


class MTable(BoolTable):
    pass


class NTable(BoolTable):
    pass


def compute_m(g: NCSpectrumGraph) -> MTable:
    """Fill M with the four-rule recurrence; O(k^2) time and space."""
    k = g.k
    table = MTable(k)
    M = table.rows
    M[0][0] = 1
    if k == 0:
        return table
    M[1][0] = g.ex(0, 1)
    M[0][1] = g.ey(1, 0)
    for j in range(2, k + 1):
        into_xj = set(g.x_in[j])
        from_yj = set(g.y_out[j])
        y_step = g.y_next[j]  # E(y_j, y_{j-1})
        x_step = g.x_next[j - 1]  # E(x_{j-1}, x_j)
        prev = M[j - 1]
        cur = M[j]
        for i in range(j - 1):
            if M[i][j - 1]:
                if i in into_xj:
                    cur[j - 1] = 1
                if y_step:
                    M[i][j] = 1
            if prev[i]:
                if x_step:
                    cur[i] = 1
                if i in from_yj:
                    prev[j] = 1
    return table


def compute_n(g: NCSpectrumGraph) -> NTable:
    """Fill N from the centre outwards.

    Besides the four mirrored rules, a state ``(j+1, j)`` can be reached by
    the x-chain ``x_{j+1} .. x_k`` closed by the cross edge ``(x_k, y_j)``, and
    ``(j, j+1)`` by the cross edge ``(x_j, y_k)`` followed by the y-chain
    ``y_k .. y_{j+1}``; those two closures are checked once per ``j``.
    """
    k = g.k
    table = NTable(k)
    N = table.rows
    if k == 0:
        return table
    N[k][k - 1] = g.ec(k, k - 1)
    N[k - 1][k] = g.ec(k - 1, k)
    x_chain = True  # x_{j+1} -> ... -> x_k all present
    y_chain = True  # y_k -> ... -> y_{j+1} all present
    for j in range(k - 2, -1, -1):
        x_chain = x_chain and g.x_next[j + 1]
        y_chain = y_chain and g.y_next[j + 2]
        from_xj = set(g.x_out[j])
        into_yj = set(g.y_in[j])
        y_step = g.y_next[j + 1]  # E(y_{j+1}, y_j)
        x_step = g.x_next[j]  # E(x_j, x_{j+1})
        nxt = N[j + 1]
        cur = N[j]
        for i in range(k, j + 1, -1):
            if N[i][j + 1]:
                if i in from_xj:
                    cur[j + 1] = 1
                if y_step:
                    N[i][j] = 1
            if nxt[i]:
                if x_step:
                    cur[i] = 1
                if i in into_yj:
                    nxt[j] = 1
        if x_chain and g.ec(k, j):
            nxt[j] = 1
        if y_chain and g.ec(j, k):
            cur[j + 1] = 1
    return table


@dataclass(frozen=True)
class LceDia:
    """Linear encoding of M: inside-edge run lengths plus its two sub-diagonals."""

    k: int
    lce_x: tuple[int, ...]
    lce_y: tuple[int, ...]
    dia_x: tuple[bool, ...]
    dia_y: tuple[bool, ...]

    def get(self, i: int, j: int) -> bool:
        return m_entry(self, i, j)

    __call__ = get


def m_entry(ld: LceDia, i: int, j: int) -> bool:
    """Reconstruct ``M(i, j)`` in O(1)."""
    k = ld.k
    if not (0 <= i <= k and 0 <= j <= k):
        raise IndexError(f"M index ({i}, {j}) outside 0..{k}")
    if i == j:
        return i == 0
    if i < j:
        if i == j - 1:
            return ld.dia_y[j]
        return ld.dia_y[i + 1] and ld.lce_y[j] >= j - i - 1
    if j == i - 1:
        return ld.dia_x[i]
    return ld.dia_x[j + 1] and ld.lce_x[j + 1] >= i - j - 1


def _run_lengths(step: list[bool], order: range) -> list[int]:
    """Fill run lengths by retrieving each maximal run of consecutive edges once.

    ``step[z]`` says the inside edge leaving position ``z`` along *order*
    exists; the run length at the last node of a run is 0.
    """
    out = [0] * len(step)
    seq = list(order)
    pos = 0
    while pos < len(seq):
        end = pos
        while end < len(seq) - 1 and step[seq[end]]:
            end += 1
        for offset, z in enumerate(seq[pos:end + 1]):
            out[z] = end - pos - offset
        pos = end + 1
    return out


def compute_lce_dia(g: NCSpectrumGraph) -> LceDia:
    """Build the O(k) encoding of M in O(|V| + |E|) time."""
    k = g.k
    lce_x = _run_lengths(g.x_next, range(0, k + 1))
    lce_y = _run_lengths(g.y_next, range(k, -1, -1))
    dia_x = [True] + [False] * k
    dia_y = [True] + [False] * k
    partial = LceDia(k, lce_x, lce_y, dia_x, dia_y)
    for j in range(1, k + 1):
        # dia(x_j) = M(j, j-1): some inside edge (x_i, x_j) with M(i, j-1) = 1
        dia_x[j] = any(m_entry(partial, i, j - 1) for i in g.x_in[j])
        # dia(y_j) = M(j-1, j): some inside edge (y_j, y_p) with M(j-1, p) = 1
        dia_y[j] = any(m_entry(partial, j - 1, p) for p in g.y_out[j])
    return LceDia(k, tuple(lce_x), tuple(lce_y), tuple(dia_x), tuple(dia_y))


@dataclass(frozen=True)
class FeasiblePath:
    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int, EdgeType, int], ...]

    @classmethod
    def from_nodes(cls, g: NCSpectrumGraph, nodes, types=None) -> "FeasiblePath":
        nodes = tuple(nodes)
        types = types or [EdgeType.PLAIN] * (len(nodes) - 1)
        edges = tuple((u, v, t, g.gap(u, v)) for (u, v), t in zip(zip(nodes, nodes[1:]), types))
        return cls(nodes, edges)

    def coordinates(self, g: NCSpectrumGraph) -> list[int]:
        return [int(g.coords[p]) for p in self.nodes]


def _final_states(g: NCSpectrumGraph, m: MAccess) -> list[tuple[int, int]]:
    k = g.k
    if k == 0:
        return [(0, 0)] if g.ec(0, 0) else []
    out = [(k, j) for j in range(k) if g.ec(k, j) and m.get(k, j)]
    out += [(i, k) for i in range(k) if g.ec(i, k) and m.get(i, k)]
    return out


def _predecessors(g: NCSpectrumGraph, m: MAccess, i: int, j: int) -> list[tuple[int, int]]:
    """States one node shorter than ``(i, j)``, largest index first."""
    if i > j:
        if i > j + 1:
            return [(i - 1, j)] if g.x_next[i - 1] and m.get(i - 1, j) else []
        return [(p, j) for p in reversed(g.x_in[i]) if max(p, j) == i - 1 and m.get(p, j)]
    if j > i + 1:
        return [(i, j - 1)] if g.y_next[j] and m.get(i, j - 1) else []
    return [(i, q) for q in reversed(g.y_out[j]) if max(i, q) == j - 1 and m.get(i, q)]


def _assemble(g: NCSpectrumGraph, chain) -> FeasiblePath:
    # chain: linked list of states, (0, 0) first, final state last
    xs, ys = [], []
    states = []
    while chain is not None:
        states.append(chain[0])
        chain = chain[1]
    for i, j in states:
        if not xs or xs[-1] != i:
            xs.append(i)
        if not ys or ys[-1] != j:
            ys.append(j)
    nodes = [g.x(i) for i in xs] + [g.y(j) for j in reversed(ys)]
    return FeasiblePath.from_nodes(g, nodes)


def iter_solutions(g: NCSpectrumGraph, m: MAccess) -> Iterator[FeasiblePath]:
    """Depth-first backtracking over M; every branch ends in a solution."""
    for final in _final_states(g, m):
        stack = [(final, (final, None))]
        while stack:
            (i, j), chain = stack.pop()
            if (i, j) == (0, 0):
                yield _assemble(g, chain)
                continue
            preds = _predecessors(g, m, i, j)
            for state in reversed(preds):
                stack.append((state, (state, chain)))


def extract_solution(g: NCSpectrumGraph, m: MAccess) -> FeasiblePath | None:
    return next(iter_solutions(g, m), None)


def enumerate_solutions(g: NCSpectrumGraph, m: MAccess, limit: int = 100) -> list[FeasiblePath]:
    if limit < 1:
        raise ValueError("limit must be >= 1")
    return list(itertools.islice(iter_solutions(g, m), limit))


def solve_exact(g: NCSpectrumGraph, all_solutions: bool = False, limit: int = 100, fast: bool = True):
    """Feasible paths of *g*, via the linear encoding (default) or the full table."""
    m = compute_lce_dia(g) if fast else compute_m(g)
    if all_solutions:
        return enumerate_solutions(g, m, limit)
    sol = extract_solution(g, m)
    return [sol] if sol is not None else []


def edge_residue_units(g: NCSpectrumGraph, gap: int, edge_type: EdgeType) -> int:
    """Residue mass carried by an edge once its water offset is removed."""
    return gap - edge_type.water_delta * g.water_units


def edge_labels(path: FeasiblePath, g: NCSpectrumGraph, rt: ResidueTable, tol: int, limit: int) -> list[list[str]]:
    """Residue multisets explaining each edge of *path*; ``""`` marks a pure water step."""
    out = []
    for _, _, t, gap in path.edges:
        units = edge_residue_units(g, gap, t)
        if t is not EdgeType.PLAIN and abs(units) <= tol:
            out.append([""])
            continue
        out.append(decompose_gap(rt, units, tol, limit, g.delta) if units > 0 else [])
    return out


def expand_sequences(
    path: FeasiblePath,
    g: NCSpectrumGraph,
    rt: ResidueTable,
    tol: int,
    limit: int = 100,
) -> list[str]:
    """Concatenate per-edge residue labels into peptide sequences.

    Multi-residue edges contribute every ordering of each multiset.  The
    result is ordered by length, then alphabetically, and cut at *limit*.
    """
    labels = edge_labels(path, g, rt, tol, limit)
    options = []
    for multisets in labels:
        strings = sorted({o for ms in multisets for o in multiset_orderings(ms)}, key=lambda s: (len(s), s))
        if not strings:
            return []
        options.append(strings)
    if not options:
        return []
    short = [len(o[0]) for o in options]
    long = [len(o[-1]) for o in options]
    tail_min = list(itertools.accumulate(reversed(short)))[::-1] + [0]
    tail_max = list(itertools.accumulate(reversed(long)))[::-1] + [0]

    out: list[str] = []
    for total in range(tail_min[0], tail_max[0] + 1):
        level: list[str] = []

        def walk(idx, used, parts):
            if len(level) >= _LEVEL_CAP:
                return
            if idx == len(options):
                if used == total:
                    level.append("".join(parts))
                return
            for opt in options[idx]:
                rest = total - used - len(opt)
                if rest < tail_min[idx + 1]:
                    break
                if rest > tail_max[idx + 1]:
                    continue
                parts.append(opt)
                walk(idx + 1, used + len(opt), parts)
                parts.pop()

        walk(0, 0, [])
        level.sort()
        out.extend(level)
        if len(out) >= limit:
            break
    return out[:limit]
