"""Peak-list input, preprocessing and result reports."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace
from typing import Iterable, Sequence, TextIO

log = logging.getLogger(__name__)

KEEP_LOWEST = "lowest"
KEEP_INTENSE = "intense"


class MgfError(ValueError):
    pass


@dataclass(frozen=True)
class Peak:
    mass: float
    intensity: float = 1.0

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError(f"peak mass must be positive, got {self.mass}")
        if self.intensity < 0:
            raise ValueError(f"peak intensity must be non-negative, got {self.intensity}")


@dataclass(frozen=True)
class Spectrum:
    parent_mass: float
    peaks: tuple[Peak, ...] = ()
    title: str | None = None

    @property
    def k(self) -> int:
        return len(self.peaks)

    def sorted(self) -> "Spectrum":
        return replace(self, peaks=tuple(sorted(self.peaks, key=lambda p: (p.mass, -p.intensity))))


def _floats(text: str, lineno: int, what: str) -> list[float]:
    try:
        return [float(t) for t in text.split()]
    except ValueError:
        raise MgfError(f"line {lineno}: malformed {what}: {text.strip()!r}") from None


def parse_mgf(stream: TextIO | Iterable[str]) -> list[Spectrum]:
    """Read the supported MGF subset: singly charged, centroided peak lists."""
    spectra = []
    block = None
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "BEGIN IONS":
            if block is not None:
                raise MgfError(f"line {lineno}: BEGIN IONS inside an open block")
            block = {"title": None, "pepmass": None, "peaks": [], "start": lineno}
            continue
        if block is None:
            raise MgfError(f"line {lineno}: content outside BEGIN IONS/END IONS")
        if line == "END IONS":
            if block["pepmass"] is None:
                raise MgfError(f"line {block['start']}: block without PEPMASS")
            spectra.append(Spectrum(block["pepmass"], tuple(block["peaks"]), block["title"]))
            block = None
            continue
        if "=" in line and line[0].isalpha():
            key, _, value = line.partition("=")
            key = key.strip().upper()
            if key == "TITLE":
                block["title"] = value.strip()
            elif key == "PEPMASS":
                numbers = _floats(value, lineno, "PEPMASS")
                if not numbers:
                    raise MgfError(f"line {lineno}: empty PEPMASS")
                block["pepmass"] = numbers[0]
            elif key == "CHARGE":
                if value.strip() not in ("1+", "1"):
                    raise MgfError(f"line {lineno}: unsupported charge {value.strip()!r}")
            else:
                log.debug("line %d: ignoring %s", lineno, key)
            continue
        numbers = _floats(line, lineno, "peak line")
        if len(numbers) != 2:
            raise MgfError(f"line {lineno}: malformed peak line: {line!r}")
        try:
            block["peaks"].append(Peak(*numbers))
        except ValueError as exc:
            raise MgfError(f"line {lineno}: {exc}") from None
    if block is not None:
        raise MgfError(f"line {block['start']}: unterminated BEGIN IONS block")
    return spectra


def _fmt(x: float) -> str:
    return f"{x:.6f}".rstrip("0").rstrip(".") if x != int(x) else f"{x:.1f}"


def write_mgf(spectra: Sequence[Spectrum]) -> str:
    out = []
    for s in spectra:
        out.append("BEGIN IONS")
        if s.title:
            out.append(f"TITLE={s.title}")
        out.append(f"PEPMASS={_fmt(s.parent_mass)}")
        out.append("CHARGE=1+")
        for p in s.peaks:
            out.append(f"{_fmt(p.mass)} {_fmt(p.intensity)}")
        out.append("END IONS")
    return "\n".join(out) + ("\n" if out else "")


def filter_intensity(s: Spectrum, min_rel: float = 5.0) -> Spectrum:
    """Keep peaks at or above *min_rel* percent of the most intense peak."""
    if min_rel < 0:
        raise ValueError("min_rel must be >= 0")
    s = s.sorted()
    if not s.peaks:
        return s
    top = max(p.intensity for p in s.peaks)
    cut = top * min_rel / 100.0
    return replace(s, peaks=tuple(p for p in s.peaks if p.intensity >= cut))


def merge_isotopes(s: Spectrum, window: float = 1.5, strategy: str = KEEP_LOWEST) -> Spectrum:
    """Collapse chains of peaks spaced at most *window* apart into one peak.

    The merged peak carries the summed intensity and either the lowest mass of
    the chain (the monoisotopic peak) or the mass of its most intense member.
    """
    if window <= 0:
        raise ValueError("window must be positive")
    if strategy not in (KEEP_LOWEST, KEEP_INTENSE):
        raise ValueError(f"unknown isotope strategy {strategy!r}")
    s = s.sorted()
    groups: list[list[Peak]] = []
    for p in s.peaks:
        if groups and p.mass - groups[-1][-1].mass <= window:
            groups[-1].append(p)
        else:
            groups.append([p])
    merged = []
    for g in groups:
        total = sum(p.intensity for p in g)
        if strategy == KEEP_LOWEST:
            mass = g[0].mass
        else:
            mass = max(g, key=lambda p: p.intensity).mass
        merged.append(Peak(mass, total))
    return replace(s, peaks=tuple(merged))


def preprocess(
    s: Spectrum,
    min_rel: float = 5.0,
    merge: bool = True,
    window: float = 1.5,
    strategy: str = KEEP_LOWEST,
) -> Spectrum:
    s = filter_intensity(s, min_rel)
    if merge:
        s = merge_isotopes(s, window, strategy)
    return s


@dataclass(frozen=True)
class EdgeLabel:
    gap: float
    decompositions: tuple[str, ...]
    kind: str = "plain"


@dataclass(frozen=True)
class CandidateResult:
    rank: int
    score: float | None
    path: tuple[float, ...]
    edges: tuple[EdgeLabel, ...]
    sequences: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "score": None if self.score is None else round(self.score, 6),
            "path": [round(c, 6) for c in self.path],
            "edges": [
                {"gap": round(e.gap, 6), "type": e.kind, "decompositions": list(e.decompositions)}
                for e in self.edges
            ],
            "sequences": list(self.sequences),
        }


def report_dict(results: Sequence[CandidateResult], modifications=None, title=None) -> dict:
    doc: dict = {}
    if title is not None:
        doc["title"] = title
    doc["candidates"] = [r.to_dict() for r in results]
    if modifications is not None:
        doc["modifications"] = [m.to_dict() for m in modifications]
    return doc


def emit_report(
    results: Sequence[CandidateResult],
    fmt: str = "json",
    modifications=None,
    title: str | None = None,
) -> bytes:
    """Serialize results deterministically as one JSON document or as text lines.

    Text lines are ``rank<TAB>score<TAB>sequence`` per candidate and
    ``mod<TAB>left<TAB>right<TAB>gap<TAB>residue:delta,...`` per modification.
    """
    if fmt == "json":
        doc = report_dict(results, modifications, title)
        return (json.dumps(doc, separators=(",", ":")) + "\n").encode("utf-8")
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = []
    if title is not None:
        lines.append(f"# {title}")
    for r in results:
        score = "NA" if r.score is None else f"{r.score:.4f}"
        seq = r.sequences[0] if r.sequences else ""
        lines.append(f"{r.rank}\t{score}\t{seq}")
    for m in modifications or ():
        d = m.to_dict()
        cands = ",".join(f"{c['residue']}:{c['delta']:+.4f}" for c in d["candidates"])
        lines.append(f"mod\t{d['left']:.4f}\t{d['right']:.4f}\t{d['gap']:.4f}\t{cands}")
    return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""
