"""Single-modification discovery.

A modified residue shows up as a missing edge: its gap is not a sum of
residue masses.  A missing edge is worth reporting when adding it would
complete a feasible path through it, which the M and N tables decide
without re-solving: the path splits into a part before the new edge
(an M state) and a part after it (an N state) that must agree on which
node of each pair they use.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .dpsolver import MAccess, NTable, compute_lce_dia, extract_solution, iter_solutions
from .masskit import ResidueTable
from .ncgraph import NCSpectrumGraph


@dataclass(frozen=True)
class ModificationReport:
    """A missing edge whose interval may hold one modified residue.

    Coordinates and deltas are in daltons; ``candidates`` pairs each residue
    with the mass shift that would make it fill the gap, smallest shift first.
    """

    left_node: str
    right_node: str
    left_coord: float
    right_coord: float
    gap: float
    candidates: tuple[tuple[str, float], ...]
    low_priority: bool = False
    edge: tuple[int, int] = (0, 0)  # node positions in the graph

    def to_dict(self) -> dict:
        return {
            "left": round(self.left_coord, 6),
            "right": round(self.right_coord, 6),
            "gap": round(self.gap, 6),
            "nodes": [self.left_node, self.right_node],
            "candidates": [{"residue": r, "delta": round(d, 6)} for r, d in self.candidates],
            "low_priority": self.low_priority,
        }


def missing_edges(g: NCSpectrumGraph, max_gap: int | None = None) -> Iterator[tuple[int, int]]:
    """Node pairs ``u < v`` not from one ion pair, rising coordinate, no plain edge."""
    n = len(g.nodes)
    for u in range(n):
        for v in range(u + 1, n):
            if g.pair_of(u) == g.pair_of(v) > 0 or g.has_edge(u, v):
                continue
            gap = g.gap(u, v)
            if gap <= 0 or (max_gap is not None and gap >= max_gap):
                continue
            yield u, v


def _x_chain_from(g: NCSpectrumGraph) -> list[bool]:
    """``out[j]``: x_j -> x_{j+1} -> ... -> x_k is all present."""
    k = g.k
    out = [False] * (k + 1)
    out[k] = True
    for j in range(k - 1, -1, -1):
        out[j] = out[j + 1] and g.x_next[j]
    return out


def _y_chain_to(g: NCSpectrumGraph) -> list[bool]:
    """``out[q]``: y_k -> y_{k-1} -> ... -> y_q is all present."""
    k = g.k
    out = [False] * (k + 1)
    out[k] = True
    for q in range(k - 1, -1, -1):
        out[q] = out[q + 1] and g.y_next[q + 1]
    return out


def completes_path(g: NCSpectrumGraph, m: MAccess, n: NTable, u: int, v: int, chains=None) -> bool:
    """Would adding the edge ``(u, v)`` create a feasible path through it?"""
    k = g.k
    x_chain, y_chain = chains or (_x_chain_from(g), _y_chain_to(g))
    if g.is_x(u) and not g.is_x(v):
        i, j = u, g.pair_of(v)
        return max(i, j) == k and m.get(i, j)
    if g.is_x(u):
        i, j = u, v
        if i + 1 < j:
            return m.get(i, i + 1) and n.get(j, i + 1)
        # x_i, x_{i+1} adjacent: the right part must jump over pairs i, i+1
        for (a, b) in g.plain:
            if g.is_x(a) or g.is_x(b):
                continue
            q, p = g.pair_of(a), g.pair_of(b)
            if q > j and p <= i and m.get(i, p) and n.get(j, q):
                return True
        if x_chain[j]:
            return any(g.ec(k, p) and m.get(i, p) for p in range(i + 1))
        return False
    q, p = g.pair_of(u), g.pair_of(v)
    if p + 1 < q:
        return m.get(p + 1, p) and n.get(p + 1, q)
    # y_{p+1}, y_p adjacent: the left part must jump over pairs p, p+1
    for (a, b) in g.plain:
        if not (g.is_x(a) and g.is_x(b)):
            continue
        if a <= p and b > q and m.get(a, p) and n.get(b, q):
            return True
    if y_chain[q]:
        return any(g.ec(s, k) and m.get(s, p) for s in range(p + 1))
    return False


def find_modifications(
    g: NCSpectrumGraph,
    m: MAccess,
    n: NTable,
    rt: ResidueTable,
    max_gap: int | None = None,
) -> list[ModificationReport]:
    """Report every missing edge (gap below *max_gap* units) that would complete a feasible path.

    Reports are in node order, deduplicated by interval.  They are flagged
    ``low_priority`` when the graph already has a feasible path of its own.
    """
    low = extract_solution(g, m) is not None
    chains = (_x_chain_from(g), _y_chain_to(g))
    masses = rt.masses
    seen = set()
    out = []
    for u, v in missing_edges(g, max_gap):
        if not completes_path(g, m, n, u, v, chains):
            continue
        lo, hi = int(g.coords[u]), int(g.coords[v])
        if (lo, hi) in seen:
            continue
        seen.add((lo, hi))
        gap = (hi - lo) * g.delta
        cands = sorted(((s, gap - mass) for s, mass in masses.items()), key=lambda c: (abs(c[1]), c[0]))
        out.append(
            ModificationReport(
                g.nodes[u].label,
                g.nodes[v].label,
                lo * g.delta,
                hi * g.delta,
                gap,
                tuple((s, round(d, 6)) for s, d in cands),
                low,
                (u, v),
            )
        )
    return out


def confirm_report(g: NCSpectrumGraph, report: ModificationReport, max_paths: int = 100_000) -> bool:
    """Re-solve *g* with the reported edge added and look for a path through it."""
    u, v = report.edge
    g2 = g.with_edge(u, v)
    for n, path in enumerate(iter_solutions(g2, compute_lce_dia(g2))):
        if (u, v) in zip(path.nodes, path.nodes[1:]):
            return True
        if n + 1 >= max_paths:
            break
    return False
