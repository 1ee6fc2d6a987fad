import numpy as np
import pytest

from biplex.bigraph import BipartiteGraph, from_biadjacency, generate_er


def k33():
    return from_biadjacency(np.ones((3, 3), dtype=int))


def k33_minus(*pairs):
    a = np.ones((3, 3), dtype=int)
    for i, j in pairs:
        a[i, j] = 0
    return from_biadjacency(a)


def path4():
    """l0 - r0 - l1 - r1 with unified ids l0=0, l1=1, r0=2, r1=3."""
    return BipartiteGraph(2, 2, [(0, 0), (1, 0), (1, 1)])


def two_k44():
    a = np.zeros((8, 8), dtype=int)
    a[:4, :4] = 1
    a[4:, 4:] = 1
    return from_biadjacency(a)


def random_small(seed, lo=4, hi=8, dens_frac=(0.2, 0.9)):
    rng = np.random.default_rng(seed)
    nl, nr = (int(x) for x in rng.integers(lo, hi + 1, size=2))
    top = 2 * nl * nr / (nl + nr)
    dens = float(rng.uniform(*dens_frac)) * top
    return generate_er(nl, nr, dens, seed)


@pytest.fixture
def K33():
    return k33()


@pytest.fixture
def P4():
    return path4()


# one line per acceptance criterion, printed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
