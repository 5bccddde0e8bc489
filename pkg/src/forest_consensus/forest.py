"""Maximum out-forests and the stochastic matrix of maximum out-forests.

Everything here is exact: weights are Fractions and no float is ever formed.
Enumeration is exponential in general and guarded by a vertex-count cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import prod

import numpy as np

from . import rational as rq
from .digraph import Arc, WeightedDigraph, bicomponents

DEFAULT_CAP = 12


class EnumerationCapExceeded(ValueError):
    def __init__(self, n: int, cap: int):
        self.n, self.cap = n, cap
        super().__init__(
            f"forest enumeration refused: digraph has {n} vertices, cap is {cap} "
            "(raise the cap explicitly if you accept exponential run time)"
        )


@dataclass(frozen=True)
class OutForest:
    """A spanning diverging forest given by its arcs; ``parent[v]`` is None for roots."""

    n: int
    arcs: tuple[Arc, ...]
    weight: Fraction
    roots: frozenset[int]
    parent: tuple[int | None, ...]

    @classmethod
    def from_arcs(cls, n: int, arcs) -> "OutForest":
        arcs = tuple(sorted(arcs))
        parent: list[int | None] = [None] * n
        for a in arcs:
            if parent[a.head] is not None:
                raise ValueError(f"vertex {a.head} has indegree 2")
            parent[a.head] = a.tail
        for v in range(n):
            # walking up more than n steps means a cycle
            u, steps = v, 0
            while parent[u] is not None:
                u = parent[u]
                steps += 1
                if steps > n:
                    raise ValueError("arc set contains a cycle")
        roots = frozenset(v for v in range(n) if parent[v] is None)
        weight = prod((a.weight for a in arcs), start=Fraction(1))
        return cls(n, arcs, weight, roots, tuple(parent))

    def key(self) -> tuple[tuple[int, int], ...]:
        return tuple((a.tail, a.head) for a in self.arcs)

    def root_of(self, v: int) -> int:
        while self.parent[v] is not None:
            v = self.parent[v]
        return v

    def format(self, index: int) -> str:
        arcs = ",".join(f"{a.tail + 1}->{a.head + 1}" for a in self.arcs)
        return f"#{index} weight={rq.format_fraction(self.weight)} arcs=({arcs})"


@dataclass(frozen=True, eq=False)
class ForestCensus:
    d: int
    max_arc_count: int
    count: int
    f: Fraction
    f_matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class ForestMatrix:
    entries: np.ndarray
    census: ForestCensus

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def as_float(self) -> np.ndarray:
        return rq.to_float(self.entries)


def max_forest_dimension(g: WeightedDigraph) -> int:
    """Out-forest dimension, read off structurally as the number of basic bicomponents."""
    return bicomponents(g).d


def _check_cap(g: WeightedDigraph, cap: int) -> None:
    if g.n > cap:
        raise EnumerationCapExceeded(g.n, cap)


def _search(g: WeightedDigraph, roots_allowed: int):
    """Yield parent assignments with exactly ``roots_allowed`` roots and no cycles.

    Vertices are visited in order; each either picks one in-arc or becomes a
    root.  Choosing at most one in-arc per vertex keeps indegree <= 1; a cycle
    is caught when the new arc's tail already leads back to the current vertex.
    """
    n = g.n
    in_arcs = [sorted(g.in_arcs(v)) for v in range(n)]
    parent: list[Arc | None] = [None] * n
    assigned = [False] * n

    def closes_cycle(v: int, tail: int) -> bool:
        u = tail
        while assigned[u] and parent[u] is not None:
            if u == v:
                return True
            u = parent[u].tail
        return u == v

    def visit(v: int, roots_used: int):
        if v == n:
            if roots_used == roots_allowed:
                yield tuple(a for a in parent if a is not None)
            return
        assigned[v] = True
        for arc in in_arcs[v]:
            if closes_cycle(v, arc.tail):
                continue
            parent[v] = arc
            yield from visit(v + 1, roots_used)
        parent[v] = None
        if roots_used < roots_allowed:
            yield from visit(v + 1, roots_used + 1)
        assigned[v] = False

    yield from visit(0, 0)


def _sorted_forests(n: int, arc_sets) -> list[OutForest]:
    forests = [OutForest.from_arcs(n, arcs) for arcs in arc_sets]
    forests.sort(key=OutForest.key)
    return forests


def enumerate_max_forests(g: WeightedDigraph, cap: int = DEFAULT_CAP) -> list[OutForest]:
    """All maximum out-forests of ``g``, ordered lexicographically by sorted arc list."""
    _check_cap(g, cap)
    d = max_forest_dimension(g)
    forests = _sorted_forests(g.n, _search(g, d))
    if not forests:
        raise RuntimeError(f"no out-forest with {g.n - d} arcs found; basic bicomponent count {d} is inconsistent")
    return forests


def compose_max_forests(g: WeightedDigraph, cap: int = DEFAULT_CAP) -> list[OutForest]:
    """Maximum out-forests assembled from per-bicomponent trees and a residual forest.

    A spanning diverging tree is chosen inside every basic bicomponent, and a
    maximum out-forest is chosen in the digraph left after deleting all arcs
    internal to basic bicomponents; every combination is a maximum out-forest
    and every maximum out-forest arises this way.
    """
    _check_cap(g, cap)
    dec = bicomponents(g)
    tree_choices = []
    internal: set[tuple[int, int]] = set()
    for comp in dec.basic_components():
        sub, labels = g.subdigraph(comp)
        trees = []
        for arcs in _search(sub, 1):
            trees.append(tuple(Arc(labels[a.tail], labels[a.head], a.weight) for a in arcs))
        tree_choices.append(trees)
        internal.update((a.tail, a.head) for a in g.arcs if a.tail in comp and a.head in comp)
    residual = g.without_arcs(internal)
    residual_forests = list(_search(residual, max_forest_dimension(residual)))
    combos = (
        tuple(a for part in parts for a in part) + rest
        for parts in product(*tree_choices)
        for rest in residual_forests
    )
    return _sorted_forests(g.n, combos)


def census(g: WeightedDigraph, forests: list[OutForest]) -> ForestCensus:
    n = g.n
    f_matrix = rq.zeros(n)
    total = Fraction(0)
    for forest in forests:
        total += forest.weight
        for i in range(n):
            f_matrix[i, forest.root_of(i)] += forest.weight
    arc_counts = {len(fr.arcs) for fr in forests}
    if len(arc_counts) != 1:
        raise ValueError("forests passed to census differ in arc count")
    m = arc_counts.pop()
    return ForestCensus(d=n - m, max_arc_count=m, count=len(forests), f=total, f_matrix=rq.frozen(f_matrix))


def forest_matrix(g: WeightedDigraph, cap: int = DEFAULT_CAP) -> ForestMatrix:
    """Exact ``J_ij = f_ij / f`` from a full enumeration of maximum out-forests."""
    forests = enumerate_max_forests(g, cap)
    c = census(g, forests)
    structural_d = max_forest_dimension(g)
    if c.d != structural_d:
        raise RuntimeError(f"out-forest dimension mismatch: enumeration {c.d}, bicomponents {structural_d}")
    entries = c.f_matrix / c.f
    return ForestMatrix(rq.frozen(_as_fractions(entries)), c)


def _as_fractions(a: np.ndarray) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = Fraction(v)
    return out


def forest_listing(forests: list[OutForest]) -> str:
    return "\n".join(fr.format(k) for k, fr in enumerate(forests, start=1))
