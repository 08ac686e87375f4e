"""Synthetic spectra, random graphs and brute-force oracles.

The oracles enumerate paths straight from the definitions and are
exponential on purpose; they refuse graphs with more than ``MAX_ORACLE_K``
pairs.
"""

from __future__ import annotations

import random
from typing import Callable, Iterable, Sequence

from .masskit import ResidueTable
from .ncgraph import EdgeType, NCSpectrumGraph, make_nodes
from .spectrum_io import Peak, Spectrum

MAX_ORACLE_K = 10

ISOTOPE_SPACING = 1.00335


def _round(x: float) -> float:
    return round(x, 6)


def ion_ladder(peptide: str, rt: ResidueTable, modification=None):
    """Residue masses, parent mass, and the (label, mass) b/y ion list of *peptide*."""
    unknown = [s for s in peptide if s not in rt]
    if not peptide or unknown:
        raise ValueError(f"bad peptide {peptide!r}: unknown residues {unknown}")
    masses = [rt.mass(s) for s in peptide]
    if modification is not None:
        pos, shift = modification
        if not 0 <= pos < len(peptide):
            raise ValueError(f"modification position {pos} outside the peptide")
        masses[pos] += shift
    total = sum(masses)
    W = total + rt.water
    ions = []
    prefix = 0.0
    for i in range(1, len(peptide)):
        prefix += masses[i - 1]
        ions.append((f"b{i}", prefix + rt.proton))
        ions.append((f"y{len(peptide) - i}", total - prefix + rt.water + rt.proton))
    return masses, W, ions


def synthesize_spectrum(
    peptide: str,
    rt: ResidueTable,
    *,
    ions: str = "by",
    drop: Iterable[str] = (),
    noise_peaks: int = 0,
    isotope_envelope: bool = False,
    water_losses: Iterable[int] = (),
    modification: tuple[int, float] | None = None,
    seed: int | None = 0,
    intensity: float | None = None,
) -> Spectrum:
    """Singly charged b/y spectrum of *peptide* with optional corruptions.

    b-ions are prefix + proton, y-ions suffix + water + proton.  *drop* names
    ions to omit (``"b2"``, ``"y1"``), *water_losses* lists b-ion indices that
    also show a water-loss peak.  Intensities are drawn from the seeded RNG
    unless *intensity* fixes them.
    """
    rng = random.Random(seed)
    _, W, ladder = ion_ladder(peptide, rt, modification)
    drop = set(drop)

    def level():
        return intensity if intensity is not None else round(rng.uniform(20.0, 100.0), 2)

    peaks = []
    for label, mass in ladder:
        if label[0] not in ions or label in drop:
            continue
        peaks.append(Peak(_round(mass), level()))
    by_label = dict(ladder)
    for idx in water_losses:
        base = by_label[f"b{idx}"]
        peaks.append(Peak(_round(base - rt.water), level() * 0.5))
    if isotope_envelope:
        extra = []
        for p in peaks:
            extra.append(Peak(_round(p.mass + ISOTOPE_SPACING), round(p.intensity * 0.5, 2)))
            extra.append(Peak(_round(p.mass + 2 * ISOTOPE_SPACING), round(p.intensity * 0.2, 2)))
        peaks += extra
    lo = rt.water + rt.proton + 1.0
    hi = W - rt.water + rt.proton - 1.0
    for _ in range(noise_peaks):
        peaks.append(Peak(_round(rng.uniform(lo, hi)), level()))
    peaks.sort(key=lambda p: p.mass)
    return Spectrum(_round(W), tuple(peaks), title=peptide)


def random_peptide(rng: random.Random, rt: ResidueTable, length: int) -> str:
    return "".join(rng.choice(rt.symbols) for _ in range(length))


def random_alphabet(rng: random.Random, size: int, lo: int = 50, hi: int = 200) -> ResidueTable:
    """A nominal-mass alphabet of *size* residues with distinct integer masses."""
    symbols = "ACDEFGHKMNPQRSTVWY"
    masses = rng.sample(range(lo, hi), size)
    return ResidueTable(tuple(zip(symbols[:size], map(float, masses))), water=18.0, proton=1.0)


def random_graph(
    rng: random.Random,
    k: int,
    p_edge: float = 0.35,
    water: bool = False,
    p_water: float = 0.15,
) -> NCSpectrumGraph:
    """Abstract NC-spectrum graph with random forward edges between different pairs."""
    parent = 1000
    chain = parent - 18
    lowers = sorted(rng.sample(range(20, parent // 2), k))
    nodes = make_nodes(lowers, parent, chain)
    n = len(nodes)
    edges = {}
    for u in range(n):
        for v in range(u + 1, n):
            if nodes[u].pair_index == nodes[v].pair_index > 0:
                continue
            if nodes[v].coordinate <= nodes[u].coordinate:
                continue
            types = []
            if rng.random() < p_edge:
                types.append(EdgeType.PLAIN)
            if water:
                if rng.random() < p_water:
                    types.append(EdgeType.PLUS_WATER)
                if rng.random() < p_water:
                    types.append(EdgeType.MINUS_WATER)
            if types:
                edges[(u, v)] = types
    return NCSpectrumGraph(nodes, edges, parent, 1.0, 18 if water else 0)


def _check_size(g: NCSpectrumGraph):
    if g.k > MAX_ORACLE_K:
        raise ValueError(f"oracle limited to k <= {MAX_ORACLE_K}, got k={g.k}")


def _paths_from(g: NCSpectrumGraph, start: int, types: bool = False):
    """Every directed path from *start* as (nodes, edge types); plain edges unless *types*.

    Paths that visit an ion pair twice are cut, since no definition accepts them.
    """
    out = []
    used = set()

    def walk(nodes, kinds):
        out.append((tuple(nodes), tuple(kinds)))
        u = nodes[-1]
        for v, t in g.out_edges[u]:
            if not types and t is not EdgeType.PLAIN:
                continue
            p = g.pair_of(v)
            if p in used:
                continue
            if p:
                used.add(p)
            nodes.append(v)
            kinds.append(t)
            walk(nodes, kinds)
            nodes.pop()
            kinds.pop()
            used.discard(p)

    if g.pair_of(start):
        used.add(g.pair_of(start))
    walk([start], [])
    return out


def _pair_counts(g: NCSpectrumGraph, nodes) -> dict[int, int]:
    counts: dict[int, int] = {}
    for v in nodes:
        p = g.pair_of(v)
        counts[p] = counts.get(p, 0) + 1
    return counts


def oracle_tables(g: NCSpectrumGraph):
    """M and N filled straight from their definitions, as lists of 0/1 rows."""
    _check_size(g)
    k = g.k
    lefts: dict[int, set[frozenset]] = {}
    for nodes, _ in _paths_from(g, g.x(0)):
        if g.is_x(nodes[-1]):
            lefts.setdefault(nodes[-1], set()).add(frozenset(g.pair_of(v) for v in nodes) - {0})
    rights: dict[int, set[frozenset]] = {}
    for j in range(k + 1):
        for nodes, _ in _paths_from(g, g.y(j)):
            if nodes[-1] == g.y(0):
                rights.setdefault(j, set()).add(frozenset(g.pair_of(v) for v in nodes) - {0})
    M = [[0] * (k + 1) for _ in range(k + 1)]
    for i in range(k + 1):
        for j in range(k + 1):
            need = frozenset(range(1, max(i, j) + 1))
            for a in lefts.get(i, ()):
                if any(not (a & b) and (a | b) == need for b in rights.get(j, ())):
                    M[i][j] = 1
                    break
    M[0][0] = 1

    N = [[0] * (k + 1) for _ in range(k + 1)]
    for i in range(k + 1):
        for nodes, _ in _paths_from(g, g.x(i)):
            end = nodes[-1]
            if g.is_x(end):
                continue
            j = g.pair_of(end)
            counts = _pair_counts(g, nodes)
            if all(counts.get(p, 0) == 1 for p in range(min(i, j), k + 1)):
                N[i][j] = 1
    return M, N


def oracle_paths(g: NCSpectrumGraph) -> set[tuple[int, ...]]:
    """All feasible paths: x_0 to y_0 using exactly one node of every pair j >= 1."""
    _check_size(g)
    out = set()
    for nodes, _ in _paths_from(g, g.x(0)):
        if nodes[-1] != g.y(0):
            continue
        counts = _pair_counts(g, nodes)
        if all(counts.get(p, 0) == 1 for p in range(1, g.k + 1)):
            out.add(nodes)
    return out


def water_frontier_ok(g: NCSpectrumGraph, nodes: Sequence[int], kinds: Sequence[EdgeType]) -> bool:
    """Net water of the left part up to pair t plus the right part from pair t
    stays within one water for every t, and the whole path nets to zero."""
    if sum(t.water_delta for t in kinds) != 0:
        return False
    cross = next(i for i, (u, v) in enumerate(zip(nodes, nodes[1:])) if g.is_x(u) and not g.is_x(v))
    left = [(g.pair_of(v), t.water_delta) for v, t in zip(nodes[1:cross + 1], kinds[:cross])]
    right = [(g.pair_of(u), t.water_delta) for u, t in zip(nodes[cross + 1:-1], kinds[cross + 1:])]
    for t in range(g.k + 1):
        net = sum(d for p, d in left if p <= t) + sum(d for p, d in right if p <= t)
        if abs(net) > 1:
            return False
    return True


def oracle_best_score(
    g: NCSpectrumGraph,
    score: Callable[[int, int, EdgeType], float],
    water: bool = False,
):
    """Exhaustive maximum-score path x_0 -> y_0 using at most one node per pair.

    Returns ``(best score, set of optimal (nodes, types))`` or None when no
    path exists.  With *water*, typed edges are allowed and the path must
    pass :func:`water_frontier_ok`.
    """
    _check_size(g)
    best = None
    winners = set()
    for nodes, kinds in _paths_from(g, g.x(0), types=water):
        if nodes[-1] != g.y(0):
            continue
        counts = _pair_counts(g, nodes)
        if any(counts.get(p, 0) > 1 for p in range(1, g.k + 1)):
            continue
        if water and not water_frontier_ok(g, nodes, kinds):
            continue
        total = sum(score(u, v, t) for u, v, t in zip(nodes, nodes[1:], kinds))
        if best is None or total > best + 1e-9:
            best = total
            winners = {(nodes, kinds)}
        elif abs(total - best) <= 1e-9:
            winners.add((nodes, kinds))
    return None if best is None else (best, winners)


def path_water(kinds: Iterable[EdgeType]) -> int:
    return sum(t.water_delta for t in kinds)


def oracle_modifications(g: NCSpectrumGraph, max_gap: int | None = None) -> set[tuple[int, int]]:
    """Missing edges whose addition creates a feasible path through them, by re-enumeration."""
    from .modfinder import missing_edges

    _check_size(g)
    out = set()
    for u, v in missing_edges(g, max_gap):
        paths = oracle_paths(g.with_edge(u, v))
        if any((u, v) in zip(p, p[1:]) for p in paths):
            out.add((u, v))
    return out


def oracle_q_values(g: NCSpectrumGraph, score: Callable[[int, int, EdgeType], float], water: bool = False):
    """Best score per state ``(c, i, j)``: a left part ending at x_i and a right
    part starting at y_j, sharing no pair, with net water ``c`` (0 without water)."""
    _check_size(g)
    lefts = [
        (nodes, kinds) for nodes, kinds in _paths_from(g, g.x(0), types=water) if all(g.is_x(v) for v in nodes)
    ]
    rights = []
    for j in range(g.k + 1):
        for nodes, kinds in _paths_from(g, g.y(j), types=water):
            if nodes[-1] == g.y(0):
                rights.append((nodes, kinds))
    best: dict[tuple[int, int, int], float] = {}
    for ln, lk in lefts:
        lpairs = [g.pair_of(v) for v in ln[1:]]
        for rn, rk in rights:
            rpairs = [g.pair_of(v) for v in rn[:-1]]
            if set(lpairs) & set(rpairs):
                continue
            i, j = g.pair_of(ln[-1]), g.pair_of(rn[0])
            if water:
                left = list(zip(lpairs, (t.water_delta for t in lk)))
                right = list(zip(rpairs, (t.water_delta for t in rk)))
                nets = [
                    sum(d for p, d in left if p <= t) + sum(d for p, d in right if p <= t)
                    for t in range(max(i, j) + 1)
                ]
                if any(abs(c) > 1 for c in nets):
                    continue
                c = nets[-1]
            else:
                c = 0
            total = sum(score(u, v, t) for u, v, t in zip(ln, ln[1:], lk))
            total += sum(score(u, v, t) for u, v, t in zip(rn, rn[1:], rk))
            key = (c, i, j)
            if key not in best or total > best[key]:
                best[key] = total
    return best
