"""De novo peptide sequencing on NC-spectrum graphs."""

from .dpsolver import (
    FeasiblePath,
    compute_lce_dia,
    compute_m,
    compute_n,
    enumerate_solutions,
    expand_sequences,
    extract_solution,
    m_entry,
    solve_exact,
)
from .masskit import ResidueTable, build_mass_array, default_table, discretize, load_residue_table, nominal_table
from .modfinder import ModificationReport, find_modifications
from .ncgraph import EdgeType, NCSpectrumGraph, build_graph
from .scorer import ScoreFunction, best_scored_path, compute_q, compute_q_water, default_score
from .spectrum_io import Peak, Spectrum, parse_mgf, write_mgf

__all__ = [
    "EdgeType",
    "FeasiblePath",
    "ModificationReport",
    "NCSpectrumGraph",
    "Peak",
    "ResidueTable",
    "ScoreFunction",
    "Spectrum",
    "best_scored_path",
    "build_graph",
    "build_mass_array",
    "compute_lce_dia",
    "compute_m",
    "compute_n",
    "compute_q",
    "compute_q_water",
    "default_score",
    "default_table",
    "discretize",
    "enumerate_solutions",
    "expand_sequences",
    "extract_solution",
    "find_modifications",
    "load_residue_table",
    "m_entry",
    "nominal_table",
    "parse_mgf",
    "solve_exact",
    "write_mgf",
]
