"""Influence matrices, their communication digraphs, and Laplacians.

Input always describes entries ``a_ij`` of the influence matrix ("agent i
weighs its discrepancy with agent j").  The corresponding digraph arc points in
the direction of influence, ``j -> i``, with weight ``a_ij``.  That reversal
happens in exactly one place: :meth:`WeightedDigraph.from_influence`.

Vertices are 0-based inside the library and 1-based in every text format.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from . import rational as rq


class DigraphFormatError(ValueError):
    """Raised for malformed digraph files; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True, order=True)
class Arc:
    tail: int
    head: int
    weight: Fraction


@dataclass(frozen=True)
class WeightedDigraph:
    """Weighted communication digraph on vertices ``0..n-1``.

    Use :meth:`from_influence` to build one from influence-matrix entries.
    Direct construction takes arcs already oriented tail -> head.
    """

    n: int
    arcs: tuple[Arc, ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"vertex count must be a positive integer, got {self.n!r}")
        seen = set()
        normalised = []
        for arc in self.arcs:
            t, h = arc.tail, arc.head
            if not (0 <= t < self.n and 0 <= h < self.n):
                raise ValueError(f"arc {t}->{h} has a vertex outside 0..{self.n - 1}")
            if t == h:
                raise ValueError(f"self-loop at vertex {t} is not allowed")
            if (t, h) in seen:
                raise ValueError(f"duplicate arc {t}->{h}")
            w = rq.to_fraction(arc.weight)
            if w <= 0:
                raise ValueError(f"arc {t}->{h} has non-positive weight {w}")
            seen.add((t, h))
            normalised.append(Arc(t, h, w))
        object.__setattr__(self, "arcs", tuple(sorted(normalised)))

    @classmethod
    def from_influence(cls, n: int, entries: Mapping[tuple[int, int], object]) -> "WeightedDigraph":
        """Build from 0-based influence entries ``{(i, j): a_ij}``; each becomes arc j -> i."""
        arcs = []
        for (i, j), a in entries.items():
            if i == j:
                raise ValueError(f"diagonal entry a_{i}{i} is not allowed")
            arcs.append(Arc(tail=j, head=i, weight=rq.to_fraction(a)))
        return cls(n, tuple(arcs))

    @classmethod
    def edgeless(cls, n: int) -> "WeightedDigraph":
        return cls(n, ())

    def influence(self, i: int, j: int) -> Fraction:
        """Return ``a_ij`` (weight of arc j -> i, or 0)."""
        return self._weights.get((j, i), Fraction(0))

    @property
    def _weights(self) -> dict[tuple[int, int], Fraction]:
        cache = self.__dict__.get("_wcache")
        if cache is None:
            cache = {(a.tail, a.head): a.weight for a in self.arcs}
            object.__setattr__(self, "_wcache", cache)
        return cache

    def in_arcs(self, v: int) -> list[Arc]:
        return [a for a in self.arcs if a.head == v]

    def successors(self, v: int) -> list[int]:
        return [a.head for a in self.arcs if a.tail == v]

    def subdigraph(self, vertices: Iterable[int]) -> tuple["WeightedDigraph", list[int]]:
        """Induced subdigraph, relabelled; also returns the original label of each new vertex."""
        keep = sorted(set(vertices))
        index = {v: k for k, v in enumerate(keep)}
        arcs = tuple(
            Arc(index[a.tail], index[a.head], a.weight)
            for a in self.arcs
            if a.tail in index and a.head in index
        )
        return WeightedDigraph(len(keep), arcs), keep

    def without_arcs(self, drop: Iterable[tuple[int, int]]) -> "WeightedDigraph":
        drop = set(drop)
        return WeightedDigraph(self.n, tuple(a for a in self.arcs if (a.tail, a.head) not in drop))


@dataclass(frozen=True, eq=False)
class LaplacianMatrix:
    """``L = diag(A 1) - A`` as an exact rational matrix."""

    entries: np.ndarray
    source: WeightedDigraph | None = None

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def as_float(self) -> np.ndarray:
        return rq.to_float(self.entries)

    def max_out_influence(self) -> Fraction:
        """``max_i sum_{j != i} a_ij``, i.e. the largest diagonal entry."""
        return max((self.entries[i, i] for i in range(self.n)), default=Fraction(0))


def laplacian(g: WeightedDigraph) -> LaplacianMatrix:
    L = rq.zeros(g.n)
    for arc in g.arcs:
        # arc j -> i carries a_ij
        i, j = arc.head, arc.tail
        L[i, j] -= arc.weight
        L[i, i] += arc.weight
    return LaplacianMatrix(rq.frozen(L), g)


@dataclass(frozen=True)
class BicomponentDecomposition:
    components: tuple[frozenset[int], ...]
    basic: tuple[int, ...]
    reachable_from: tuple[frozenset[int], ...]
    component_of: tuple[int, ...]

    @property
    def d(self) -> int:
        return len(self.basic)

    def basic_components(self) -> list[frozenset[int]]:
        return [self.components[b] for b in self.basic]

    def basic_vertices(self) -> frozenset[int]:
        return frozenset().union(*self.basic_components()) if self.basic else frozenset()


def strongly_connected_components(g: WeightedDigraph) -> list[list[int]]:
    """Iterative Tarjan; components sorted by smallest vertex."""
    succ = [[] for _ in range(g.n)]
    for a in g.arcs:
        succ[a.tail].append(a.head)
    index = [None] * g.n
    low = [0] * g.n
    on_stack = [False] * g.n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(g.n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            if pos < len(succ[v]):
                work[-1] = (v, pos + 1)
                w = succ[v][pos]
                if index[w] is None:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    comps.sort(key=min)
    return comps


def bicomponents(g: WeightedDigraph) -> BicomponentDecomposition:
    comps = strongly_connected_components(g)
    comp_of = [0] * g.n
    for c, members in enumerate(comps):
        for v in members:
            comp_of[v] = c
    has_incoming = [False] * len(comps)
    cond_succ: list[set[int]] = [set() for _ in comps]
    for a in g.arcs:
        ct, ch = comp_of[a.tail], comp_of[a.head]
        if ct != ch:
            has_incoming[ch] = True
            cond_succ[ct].add(ch)
    basic = tuple(c for c in range(len(comps)) if not has_incoming[c])

    reach: list[set[int]] = [set() for _ in range(g.n)]
    for b in basic:
        seen = {b}
        frontier = [b]
        while frontier:
            c = frontier.pop()
            for nxt in cond_succ[c]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        for c in seen:
            for v in comps[c]:
                reach[v].add(b)
    return BicomponentDecomposition(
        components=tuple(frozenset(c) for c in comps),
        basic=basic,
        reachable_from=tuple(frozenset(r) for r in reach),
        component_of=tuple(comp_of),
    )


# -- text format ---------------------------------------------------------------

_RATIO = re.compile(r"^[+-]?\d+/\d+$")
_DECIMAL = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def parse_weight(token: str) -> Fraction:
    """Parse ``p/q`` or a decimal literal exactly (``0.5`` -> ``1/2``)."""
    if _RATIO.match(token):
        num, den = token.split("/")
        if int(den) == 0:
            raise ValueError(f"zero denominator in {token!r}")
        return Fraction(int(num), int(den))
    if _DECIMAL.match(token):
        return Fraction(token)
    raise ValueError(f"not a rational or decimal literal: {token!r}")


def parse_digraph(text: str) -> WeightedDigraph:
    n = None
    entries: dict[tuple[int, int], Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise DigraphFormatError("expected 'n <count>' as the first line", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise DigraphFormatError(f"bad vertex count {parts[1]!r}", lineno) from None
            if n < 1:
                raise DigraphFormatError("vertex count must be at least 1", lineno)
            continue
        if len(parts) != 4 or parts[0] != "a":
            raise DigraphFormatError("expected 'a <i> <j> <weight>'", lineno)
        try:
            i, j = int(parts[1]), int(parts[2])
        except ValueError:
            raise DigraphFormatError("vertex indices must be integers", lineno) from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise DigraphFormatError(f"vertex index out of 1..{n}", lineno)
        if i == j:
            raise DigraphFormatError(f"self-loop entry a_{i}{i} is not allowed", lineno)
        try:
            w = parse_weight(parts[3])
        except ValueError as exc:
            raise DigraphFormatError(str(exc), lineno) from None
        if w <= 0:
            raise DigraphFormatError(f"weight must be positive, got {parts[3]}", lineno)
        key = (i - 1, j - 1)
        if key in entries:
            raise DigraphFormatError(f"duplicate entry a_{i},{j}", lineno)
        entries[key] = w
    if n is None:
        raise DigraphFormatError("missing 'n <count>' line")
    return WeightedDigraph.from_influence(n, entries)


def format_digraph(g: WeightedDigraph) -> str:
    lines = [f"n {g.n}"]
    for a in sorted(g.arcs, key=lambda a: (a.head, a.tail)):
        lines.append(f"a {a.head + 1} {a.tail + 1} {rq.format_fraction(a.weight)}")
    return "\n".join(lines) + "\n"


def read_digraph(path) -> WeightedDigraph:
    with open(path, encoding="utf-8") as fh:
        return parse_digraph(fh.read())
