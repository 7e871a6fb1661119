import math
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from qckit.generators import LatticeSpec, gen_lattice, gen_union  # noqa: E402
from qckit.multiset import Window  # noqa: E402
from qckit.spectrum import lattice_spectrum, union_spectrum  # noqa: E402

SQRT2 = math.sqrt(2.0)
UNION_DENSITY = 1 + 1 / SQRT2
ACCEPTANCE_LINES = []


def lattice(alpha, shift, lo, hi):
    return gen_lattice(LatticeSpec(alpha, shift, Window.closed(lo, hi)))


def union_fixture(radius):
    """(Z + 1/4) u (sqrt2 Z + 1/4) on [-radius, radius]."""
    w = Window.closed(-radius, radius)
    return gen_union([LatticeSpec(1.0, 0.25, w), LatticeSpec(SQRT2, 0.25, w)])


def lattice_union_spectrum(pieces, band=(-64.0, 64.0)):
    b = Window.closed(*band)
    return union_spectrum([lattice_spectrum(LatticeSpec(a, s, b), b) for a, s in pieces])


@pytest.fixture(scope="session")
def union_small():
    return union_fixture(300.0)


@pytest.fixture(scope="session")
def union_spec():
    return lattice_union_spectrum([(1.0, 0.25), (SQRT2, 0.25)])


@pytest.fixture(scope="session")
def half_lattice_big():
    return lattice(1.0, 0.5, -100_010, 100_010)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
