from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from forest_consensus import WeightedDigraph, read_digraph

DATA = Path(__file__).resolve().parent.parent / "data"
SEVEN_PATH = DATA / "seven_agents.dg"

SEVEN_L = [
    [2, -2, 0, 0, 0, 0, 0],
    [-1, 1, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, -1, 0, 0],
    [0, 0, -2, 4, -2, 0, 0],
    [0, 0, 0, -2, 2, 0, 0],
    [0, -3, -2, 0, 0, 5, 0],
    [0, 0, -4, 0, 0, -1, 5],
]

SEVEN_J750 = [
    [250, 500, 0, 0, 0, 0, 0],
    [250, 500, 0, 0, 0, 0, 0],
    [0, 0, 300, 150, 300, 0, 0],
    [0, 0, 300, 150, 300, 0, 0],
    [0, 0, 300, 150, 300, 0, 0],
    [150, 300, 120, 60, 120, 0, 0],
    [30, 60, 264, 132, 264, 0, 0],
]

# weights of the 32 maximum out-forests of the seven-agent digraph
SEVEN_FOREST_WEIGHTS = [
    12, 32, 48, 8, 6, 16, 24, 4, 6, 16, 24, 4, 6, 16, 24, 4,
    24, 64, 96, 16, 12, 32, 48, 8, 12, 32, 48, 8, 12, 32, 48, 8,
]


def seven_j_exact() -> np.ndarray:
    M = np.empty((7, 7), dtype=object)
    for i in range(7):
        for j in range(7):
            M[i, j] = Fraction(SEVEN_J750[i][j], 750)
    return M


@pytest.fixture
def seven():
    return read_digraph(SEVEN_PATH)


@pytest.fixture
def two_cycle():
    return WeightedDigraph.from_influence(2, {(0, 1): 1, (1, 0): 1})


weights = st.builds(Fraction, st.integers(1, 6), st.integers(1, 3))


@st.composite
def digraphs(draw, min_n=1, max_n=6, max_arcs=None):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=max_arcs)) if pairs else []
    entries = {p: draw(weights) for p in chosen}
    return WeightedDigraph.from_influence(n, entries)


# one line per acceptance criterion, echoed again in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
