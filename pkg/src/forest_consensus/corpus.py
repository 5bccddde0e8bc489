"""Seeded random digraphs for property checks and experiment scripts."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .digraph import WeightedDigraph


def random_digraph(
    rng: np.random.Generator,
    n: int,
    density: float = 0.3,
    max_numerator: int = 5,
    max_denominator: int = 3,
) -> WeightedDigraph:
    """Each ordered pair gets an arc independently with probability ``density``; weights ``p/q``."""
    entries = {}
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < density:
                p = int(rng.integers(1, max_numerator + 1))
                q = int(rng.integers(1, max_denominator + 1))
                entries[(i, j)] = Fraction(p, q)
    return WeightedDigraph.from_influence(n, entries)


def random_corpus(seed: int, count: int, n_min: int = 1, n_max: int = 8) -> list[WeightedDigraph]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        density = float(rng.uniform(0.1, 0.45))
        out.append(random_digraph(rng, n, density))
    return out


def random_state(rng: np.random.Generator, n: int, low: int = -10, high: int = 10) -> list[Fraction]:
    return [Fraction(int(rng.integers(low, high + 1)), int(rng.integers(1, 4))) for _ in range(n)]
