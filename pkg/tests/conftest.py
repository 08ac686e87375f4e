import random

import pytest
from hypothesis import HealthCheck, settings

from ncseq.masskit import ResidueTable, build_mass_array
from ncseq.ncgraph import build_graph
from ncseq.spectrum_io import Peak, Spectrum
from ncseq.testkit import random_alphabet, random_peptide, synthesize_spectrum

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

GA = ResidueTable((("G", 57.0), ("A", 71.0)), water=18.0, proton=1.0)


@pytest.fixture
def ga():
    return GA


def toy_graph(s, rt=GA, tol=0, water=False, h=400):
    """Graph at unit precision, the setting of the hand-worked toy instances."""
    return build_graph(s, rt, build_mass_array(rt, h, 1.0), tol, water_edges=water)


@pytest.fixture
def t1_spectrum():
    # peptide AG, y1 missing: only b1 = 71 + 1
    return Spectrum(146.0, (Peak(72.0, 100.0),), "T1")


@pytest.fixture
def t2_spectrum():
    # peptide A*G with A shifted by +14, b-ions only
    return Spectrum(160.0, (Peak(86.0, 100.0),), "T2")


@pytest.fixture
def t1(t1_spectrum):
    return toy_graph(t1_spectrum)


@pytest.fixture
def t2(t2_spectrum):
    return toy_graph(t2_spectrum)


def spectrum_graph_sample(seed: int, max_k: int = 8, drop_edges: float = 0.2, water: bool = False):
    """Graph from a synthetic spectrum over a random nominal alphabet, with some edges removed."""
    rng = random.Random(seed)
    while True:
        rt = random_alphabet(rng, rng.randint(2, 5))
        pep = random_peptide(rng, rt, rng.randint(2, 7))
        labels = [f"{c}{i}" for i in range(1, len(pep)) for c in "by"]
        drop = [lb for lb in labels if rng.random() < 0.3]
        losses = [i for i in range(1, len(pep)) if water and rng.random() < 0.3]
        s = synthesize_spectrum(pep, rt, drop=drop, noise_peaks=rng.randint(0, 2), water_losses=losses, seed=seed)
        g = toy_graph(s, rt, water=water, h=600)
        if g.k <= max_k:
            break
    removed = [e for e in sorted(g.edges) if rng.random() < drop_edges]
    return g.without_edges(removed)
