import math
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

from rieszsel import parse_tree, tree_to_metric

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def six_taxa_tree():
    return parse_tree((DATA / "six_taxa.json").read_text())


@pytest.fixture
def six_taxa_metric(six_taxa_tree):
    return tree_to_metric(six_taxa_tree)


def enumerate_energies(dist, k, s):
    """Plain-Python reference: energy of every k-subset, no numpy, no rescaling."""
    n = len(dist)
    out = {}
    for c in combinations(range(n), k):
        out[c] = math.fsum(dist[a][b] ** -s for a, b in combinations(c, 2))
    return out


def enumerate_mm(dist, k):
    out = {}
    for c in combinations(range(len(dist)), k):
        out[c] = min((dist[a][b] for a, b in combinations(c, 2)), default=math.inf)
    return out


def random_metric(rng, n, lo=1.0, hi=2.0):
    """Distances uniform in [lo, hi]; with hi <= 2 lo the triangle inequality always holds."""
    d = rng.uniform(lo, hi, size=(n, n))
    d = np.triu(d, 1)
    return d + d.T


# -- acceptance summary ------------------------------------------------------

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, note = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}  {note}")
