"""Deliberately naive reference computations, independent of the library paths they check."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import prod

import numpy as np


def is_out_forest(n: int, arcs) -> bool:
    parent = {}
    for t, h, _ in arcs:
        if h in parent:
            return False
        parent[h] = t
    for v in range(n):
        seen = set()
        while v in parent:
            if v in seen:
                return False
            seen.add(v)
            v = parent[v]
    return True


def brute_force_max_forests(g) -> list[tuple[frozenset, Fraction]]:
    """Every arc subset is tried; returns (arc-key set, weight) of the largest out-forests."""
    arcs = [(a.tail, a.head, a.weight) for a in g.arcs]
    for size in range(min(len(arcs), g.n - 1), -1, -1):
        found = [
            (frozenset((t, h) for t, h, _ in sub), prod((w for _, _, w in sub), start=Fraction(1)))
            for sub in combinations(arcs, size)
            if is_out_forest(g.n, sub)
        ]
        if found:
            return found
    return [(frozenset(), Fraction(1))]


def brute_force_forest_matrix(g) -> np.ndarray:
    forests = brute_force_max_forests(g)
    n = g.n
    f = sum(w for _, w in forests)
    M = np.empty((n, n), dtype=object)
    M.fill(Fraction(0))
    for keys, w in forests:
        parent = {h: t for t, h in keys}
        for i in range(n):
            r = i
            while r in parent:
                r = parent[r]
            M[i, r] += w
    return M / f


def dense_laplacian(g) -> np.ndarray:
    """Float Laplacian straight from the influence entries a_ij."""
    n = g.n
    A = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                A[i, j] = float(g.influence(i, j))
    return np.diag(A.sum(axis=1)) - A


def minimal_polynomial_roots(L: np.ndarray, eigenvalues, rtol: float = 1e-8) -> list[tuple[complex, int]]:
    """Distinct nonzero eigenvalues with indices from repeated numerical rank tests on L - lambda I."""
    n = L.shape[0]
    out = []
    for lam, mult in eigenvalues:
        if lam == 0:
            continue
        shifted = L - lam * np.eye(n)
        power = np.eye(n, dtype=complex)
        ranks = [n]
        for _ in range(mult + 1):
            power = power @ shifted
            s = np.linalg.svd(power, compute_uv=False)
            ranks.append(int(np.sum(s > rtol * max(s[0], 1.0))))
        nu = next((k for k in range(len(ranks) - 1) if ranks[k + 1] == ranks[k]), mult)
        out.append((lam, max(1, min(nu, mult))))
    return out
