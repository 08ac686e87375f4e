"""Residue masses, mass discretization and the decomposability array.

All downstream arithmetic happens on integer mass units: a mass in daltons
is converted once with :func:`discretize` and never goes back to floats
until it is reported.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

WATER = 18.010565
PROTON = 1.007276

DEFAULT_DELTA = 0.01
DEFAULT_MAX_GAP = 400.0
DEFAULT_TOLERANCE = 0.5

# Non-residue keys accepted in residue table files.
_CONSTANT_KEYS = ("water", "proton")


class ResidueTableError(ValueError):
    pass


@dataclass(frozen=True)
class ResidueTable:
    """An ordered residue alphabet with masses in daltons.

    ``water`` and ``proton`` are the terminal constants used to place
    nodes: toy tables set them to 18 and 1.
    """

    entries: tuple[tuple[str, float], ...]
    water: float = WATER
    proton: float = PROTON

    def __post_init__(self):
        if not self.entries:
            raise ResidueTableError("empty residue table")
        seen = set()
        for symbol, mass in self.entries:
            if symbol in seen:
                raise ResidueTableError(f"duplicate symbol {symbol!r}")
            if mass <= 0:
                raise ResidueTableError(f"non-positive mass for {symbol!r}")
            seen.add(symbol)
        if self.water <= 0:
            raise ResidueTableError("water mass must be positive")
        if self.proton < 0:
            raise ResidueTableError("proton mass must be non-negative")

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, symbol) -> bool:
        return symbol in self.masses

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.entries)

    @property
    def masses(self) -> dict[str, float]:
        return dict(self.entries)

    def mass(self, symbol: str) -> float:
        try:
            return self.masses[symbol]
        except KeyError:
            raise KeyError(f"unknown residue {symbol!r}") from None

    def unit_masses(self, delta: float) -> dict[str, int]:
        units = {s: discretize(m, delta) for s, m in self.entries}
        bad = [s for s, u in units.items() if u <= 0]
        if bad:
            raise ResidueTableError(f"residues {bad} vanish at precision {delta}")
        return units

    def equivalence_classes(self, delta: float) -> dict[str, str]:
        """Map every symbol to the first symbol (table order) sharing its unit mass."""
        first: dict[int, str] = {}
        out = {}
        for symbol, units in self.unit_masses(delta).items():
            out[symbol] = first.setdefault(units, symbol)
        return out

    def canonical(self, sequence: str, delta: float) -> str:
        classes = self.equivalence_classes(delta)
        return "".join(classes[s] for s in sequence)


def parse_residue_table(lines: Iterable[str]) -> ResidueTable:
    """Parse ``symbol<whitespace>mass`` lines; ``#`` lines are comments.

    The keys ``water`` and ``proton`` override the terminal constants.
    """
    entries = []
    constants: dict[str, float] = {}
    seen = set()
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ResidueTableError(f"line {lineno}: expected 'symbol mass', got {raw!r}")
        symbol, text = parts
        try:
            mass = float(text)
        except ValueError:
            raise ResidueTableError(f"line {lineno}: bad mass {text!r}") from None
        if symbol.lower() in _CONSTANT_KEYS:
            constants[symbol.lower()] = mass
            continue
        if symbol in seen:
            raise ResidueTableError(f"line {lineno}: duplicate symbol {symbol!r}")
        if mass <= 0:
            raise ResidueTableError(f"line {lineno}: non-positive mass for {symbol!r}")
        seen.add(symbol)
        entries.append((symbol, mass))
    if not entries:
        raise ResidueTableError("empty residue table")
    return ResidueTable(tuple(entries), **constants)


def load_residue_table(path: str | os.PathLike | None = None) -> ResidueTable:
    """Read a residue table file, or the bundled monoisotopic table if *path* is None."""
    if path is None:
        return default_table()
    with open(path, encoding="utf-8") as fh:
        return parse_residue_table(fh)


def _bundled(name: str) -> ResidueTable:
    text = resources.files("ncseq").joinpath("data", name).read_text(encoding="utf-8")
    return parse_residue_table(text.splitlines())


@lru_cache(maxsize=None)
def default_table() -> ResidueTable:
    return _bundled("monoisotopic.tsv")


@lru_cache(maxsize=None)
def nominal_table() -> ResidueTable:
    return _bundled("nominal.tsv")


def discretize(mass: float, delta: float) -> int:
    """Round-half-up of ``mass / delta``.

    Goes through the decimal repr so that e.g. 0.145 at 0.01 gives 15, not 14.
    """
    if mass < 0:
        raise ValueError(f"negative mass {mass}")
    if delta <= 0:
        raise ValueError(f"precision must be positive, got {delta}")
    q = Decimal(repr(float(mass))) / Decimal(repr(float(delta)))
    return int(q.quantize(Decimal(1), rounding=ROUND_HALF_UP))


@dataclass(frozen=True, eq=False)
class MassArray:
    """Boolean table: ``bits[m]`` is set iff ``m`` units is a sum of residue masses."""

    bits: np.ndarray
    delta: float
    residues: tuple[tuple[str, int], ...]
    _counts: np.ndarray = field(repr=False)

    @property
    def h(self) -> int:
        return len(self.bits) - 1

    def __getitem__(self, m: int) -> bool:
        return 0 <= m <= self.h and bool(self.bits[m])

    def hits(self, gaps: np.ndarray, tol: int) -> np.ndarray:
        """Vectorized :func:`is_residue_sum` over an integer array of gaps."""
        gaps = np.asarray(gaps, dtype=np.int64)
        lo = np.maximum(gaps - tol, 1)
        hi = np.minimum(gaps + tol, self.h)
        ok = lo <= hi
        lo = np.where(ok, lo, 1)
        hi = np.where(ok, hi, 1)
        return ok & (self._counts[hi] > self._counts[lo - 1])


def build_mass_array(rt: ResidueTable, h: int, delta: float = DEFAULT_DELTA) -> MassArray:
    """Fill the decomposability array for masses ``0..h`` units in one ascending pass.

    The pass runs in blocks one minimum-residue wide: every ``m - r`` read inside
    a block lies in an earlier block, so each block is a handful of vector ORs.
    """
    if h <= 0:
        raise ValueError(f"max mass must be positive, got {h}")
    units = rt.unit_masses(delta)
    distinct = sorted(set(units.values()))
    bits = np.zeros(h + 1, dtype=bool)
    for r in distinct:
        if r <= h:
            bits[r] = True
    step = distinct[0]
    for start in range(1, h + 1, step):
        stop = min(start + step, h + 1)
        for r in distinct:
            lo = max(start, r + 1)
            if lo < stop:
                bits[lo:stop] |= bits[lo - r:stop - r]
    counts = np.cumsum(bits, dtype=np.int64)
    return MassArray(bits, delta, tuple(units.items()), counts)


def is_residue_sum(a: MassArray, gap: int, tol: int = 0) -> bool:
    lo = max(gap - tol, 1)
    hi = min(gap + tol, a.h)
    if lo > hi:
        return False
    return bool(a._counts[hi] > a._counts[lo - 1])


def decompose_gap(
    rt: ResidueTable,
    gap: int,
    tol: int,
    limit: int,
    delta: float = DEFAULT_DELTA,
) -> list[str]:
    """Residue multisets whose mass is within *tol* units of *gap*.

    Multisets are returned as sorted symbol strings, fewest residues first,
    alphabetical within a size, at most *limit* of them.
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    units = sorted(rt.unit_masses(delta).items())
    symbols = [s for s, _ in units]
    masses = [m for _, m in units]
    lightest, heaviest = min(masses), max(masses)
    lo, hi = gap - tol, gap + tol
    if hi < lightest:
        return []

    out: list[str] = []
    max_count = hi // lightest
    for count in range(1, max_count + 1):
        if count * heaviest < lo:
            continue
        level: list[str] = []

        def extend(start, left, total, picked):
            if left == 0:
                if lo <= total:
                    level.append("".join(picked))
                return
            for idx in range(start, len(masses)):
                t = total + masses[idx]
                if t + (left - 1) * lightest > hi:
                    continue
                if t + (left - 1) * heaviest < lo:
                    continue
                picked.append(symbols[idx])
                extend(idx, left - 1, t, picked)
                picked.pop()

        extend(0, count, 0, [])
        out.extend(sorted(level))
        if len(out) >= limit:
            return out[:limit]
    return out


def multiset_orderings(multiset: str) -> list[str]:
    """All distinct orderings of a multiset string, in lexicographic order."""
    chars = sorted(multiset)
    out = []
    used = [False] * len(chars)
    buf: list[str] = []

    def walk():
        if len(buf) == len(chars):
            out.append("".join(buf))
            return
        prev = None
        for i, c in enumerate(chars):
            if used[i] or c == prev:
                continue
            prev = c
            used[i] = True
            buf.append(c)
            walk()
            buf.pop()
            used[i] = False

    walk()
    return out


def residue_mass_units(rt: ResidueTable, sequence: Sequence[str], delta: float) -> int:
    units = rt.unit_masses(delta)
    return sum(units[s] for s in sequence)
