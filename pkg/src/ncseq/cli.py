"""Command-line entry point: ``ncseq sequence | modsearch | simulate``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from typing import Sequence

from .dpsolver import FeasiblePath, compute_lce_dia, compute_n, edge_labels, expand_sequences, solve_exact
from .masskit import (
    DEFAULT_DELTA,
    DEFAULT_MAX_GAP,
    DEFAULT_TOLERANCE,
    MassArray,
    ResidueTable,
    ResidueTableError,
    build_mass_array,
    default_table,
    discretize,
    load_residue_table,
    nominal_table,
)
from .modfinder import ModificationReport, find_modifications
from .ncgraph import GraphError, NCSpectrumGraph, build_graph
from .scorer import default_score, solve_scored
from .spectrum_io import (
    CandidateResult,
    EdgeLabel,
    MgfError,
    Spectrum,
    emit_report,
    parse_mgf,
    preprocess,
    write_mgf,
)
from .testkit import synthesize_spectrum

log = logging.getLogger("ncseq")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_CANDIDATE = 2


@dataclass
class Settings:
    residues: ResidueTable = field(default_factory=default_table)
    delta: float = DEFAULT_DELTA
    max_gap: float = DEFAULT_MAX_GAP
    tol: float = DEFAULT_TOLERANCE
    min_rel_intensity: float = 5.0
    merge_isotopes: bool = True
    mode: str = "scored"
    water_edges: bool = True
    all_solutions: bool = False
    limit: int = 100

    def __post_init__(self):
        if self.mode not in ("exact", "scored"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "exact" and self.water_edges:
            raise ValueError("water edges are only available in scored mode")
        if self.limit < 1:
            raise ValueError("limit must be >= 1")
        if self.delta <= 0 or self.max_gap <= 0 or self.tol < 0:
            raise ValueError("precision and max gap must be positive, tolerance non-negative")
        self.tol_units = discretize(self.tol, self.delta)
        self.h_units = discretize(self.max_gap, self.delta)
        self._array: MassArray | None = None

    @property
    def mass_array(self) -> MassArray:
        if self._array is None:
            self._array = build_mass_array(self.residues, self.h_units, self.delta)
        return self._array


def spectrum_graph(s: Spectrum, cfg: Settings, water: bool = False) -> NCSpectrumGraph:
    s = preprocess(s, cfg.min_rel_intensity, cfg.merge_isotopes)
    return build_graph(s, cfg.residues, cfg.mass_array, cfg.tol_units, water_edges=water)


def candidate(rank: int, score: float | None, path: FeasiblePath, g: NCSpectrumGraph, cfg: Settings):
    seqs = expand_sequences(path, g, cfg.residues, cfg.tol_units, cfg.limit)
    if not seqs:
        return None
    labels = edge_labels(path, g, cfg.residues, cfg.tol_units, cfg.limit)
    edges = tuple(
        EdgeLabel(gap * g.delta, tuple(ms), t.value) for (_, _, t, gap), ms in zip(path.edges, labels)
    )
    coords = tuple(c * g.delta for c in path.coordinates(g))
    return CandidateResult(rank, score, coords, edges, tuple(seqs))


def _rank(g: NCSpectrumGraph, cfg: Settings, scored: list[tuple[float | None, FeasiblePath]]):
    out = []
    for score, path in scored:
        c = candidate(len(out) + 1, score, path, g, cfg)
        if c is not None:
            out.append(c)
    return out


def sequence_spectrum(s: Spectrum, cfg: Settings) -> list[CandidateResult]:
    """Ranked candidates for one spectrum under *cfg*."""
    if cfg.mode == "exact":
        g = spectrum_graph(s, cfg)
        paths = solve_exact(g, cfg.all_solutions, cfg.limit)
        return _rank(g, cfg, [(None, p) for p in paths])
    g = spectrum_graph(s, cfg, water=cfg.water_edges)
    best = solve_scored(g, default_score(g), water=cfg.water_edges)
    return _rank(g, cfg, [] if best is None else [(best.score, best.path)])


def modsearch_spectrum(s: Spectrum, cfg: Settings) -> tuple[list[CandidateResult], list[ModificationReport]]:
    """Exact candidates plus single-modification reports for one spectrum."""
    g = spectrum_graph(s, cfg)
    m = compute_lce_dia(g)
    n = compute_n(g)
    paths = solve_exact(g, cfg.all_solutions, cfg.limit)
    reports = find_modifications(g, m, n, cfg.residues, cfg.h_units)
    return _rank(g, cfg, [(None, p) for p in paths]), reports


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; exit status 2 means "no candidate"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _ingest_flags(p: argparse.ArgumentParser):
    p.add_argument("input", nargs="?", default="-", help="MGF file (default: stdin)")
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA, help="mass precision in Da")
    p.add_argument("--max-gap", type=float, default=DEFAULT_MAX_GAP, help="largest edge gap in Da")
    p.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE, help="mass tolerance in Da")
    p.add_argument("--min-rel-intensity", type=float, default=5.0, help="percent of the base peak")
    p.add_argument("--merge-isotopes", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--all-solutions", action="store_true")
    p.add_argument("--limit", type=int, default=100)
    p.add_argument("--residues", help="residue table file (symbol mass per line)")
    p.add_argument("--format", choices=("text", "json"), default="json")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ncseq", description="De novo peptide sequencing from MS/MS peak lists.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    seq = sub.add_parser("sequence", help="sequence every spectrum of an MGF file")
    _ingest_flags(seq)
    seq.add_argument("--mode", choices=("exact", "scored"), default="scored")
    seq.add_argument(
        "--water-edges",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="add water-loss edges (scored mode only; on by default there)",
    )
    seq.set_defaults(func=run_sequence)

    mod = sub.add_parser("modsearch", help="look for one modified residue per spectrum")
    _ingest_flags(mod)
    mod.set_defaults(func=run_modsearch)

    sim = sub.add_parser("simulate", help="write a synthetic spectrum as MGF")
    sim.add_argument("--peptide", required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--ions", choices=("by", "b", "y"), default="by")
    sim.add_argument("--drop", default="", help="comma-separated ion labels to omit, e.g. b2,y1")
    sim.add_argument("--noise-peaks", type=int, default=0)
    sim.add_argument("--isotopes", action="store_true", help="add +1/+2 isotope peaks")
    sim.add_argument("--water-loss", default="", help="comma-separated b-ion indices with a water loss")
    sim.add_argument("--modification", help="POS:DELTA, 0-based residue position and mass shift")
    tables = sim.add_mutually_exclusive_group()
    tables.add_argument("--nominal", action="store_true", help="integer residue masses")
    tables.add_argument("--residues", help="residue table file")
    sim.add_argument("-o", "--output", help="output file (default: stdout)")
    sim.set_defaults(func=run_simulate)
    return parser


def _settings(args, mode="exact", water=False) -> Settings:
    rt = load_residue_table(args.residues) if args.residues else default_table()
    return Settings(
        residues=rt,
        delta=args.delta,
        max_gap=args.max_gap,
        tol=args.tol,
        min_rel_intensity=args.min_rel_intensity,
        merge_isotopes=args.merge_isotopes,
        mode=mode,
        water_edges=water,
        all_solutions=args.all_solutions,
        limit=args.limit,
    )


def _read_spectra(path: str) -> list[Spectrum]:
    if path == "-":
        return parse_mgf(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return parse_mgf(fh)


def _write(data: bytes):
    sys.stdout.buffer.write(data)
    sys.stdout.flush()


def run_sequence(args) -> int:
    if args.mode == "exact" and args.water_edges:
        raise ValueError("--water-edges is only valid with --mode scored")
    water = args.mode == "scored" and args.water_edges is not False
    cfg = _settings(args, args.mode, water)
    spectra = _read_spectra(args.input)
    status = EXIT_OK
    for s in spectra:
        try:
            results = sequence_spectrum(s, cfg)
        except GraphError as exc:
            log.warning("%s: %s", s.title or "spectrum", exc)
            results = []
        if not results:
            status = EXIT_NO_CANDIDATE
        _write(emit_report(results, args.format, title=s.title))
    return status


def run_modsearch(args) -> int:
    cfg = _settings(args)
    spectra = _read_spectra(args.input)
    status = EXIT_OK
    for s in spectra:
        try:
            results, reports = modsearch_spectrum(s, cfg)
        except GraphError as exc:
            log.warning("%s: %s", s.title or "spectrum", exc)
            results, reports = [], []
        if not results and not reports:
            status = EXIT_NO_CANDIDATE
        _write(emit_report(results, args.format, modifications=reports, title=s.title))
    return status


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def run_simulate(args) -> int:
    if args.nominal:
        rt = nominal_table()
    elif args.residues:
        rt = load_residue_table(args.residues)
    else:
        rt = default_table()
    modification = None
    if args.modification:
        pos, _, shift = args.modification.partition(":")
        modification = (int(pos), float(shift))
    s = synthesize_spectrum(
        args.peptide,
        rt,
        ions=args.ions,
        drop=[t.strip() for t in args.drop.split(",") if t.strip()],
        noise_peaks=args.noise_peaks,
        isotope_envelope=args.isotopes,
        water_losses=_int_list(args.water_loss),
        modification=modification,
        seed=args.seed,
    )
    text = write_mgf([s])
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        _write(text.encode("utf-8"))
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (OSError, MgfError, ResidueTableError, ValueError, KeyError) as exc:
        print(f"ncseq: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
