"""Reading structure off the limiting state ``J x(0)``."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import rational as rq
from .digraph import WeightedDigraph, bicomponents, laplacian
from .dynamics import expm
from .eigenprojection import eigenprojection_recursive
from .forest import ForestMatrix

CONSENSUS_TOL = 1e-9
SHIFT_TOL = 1e-8


def _matrix(J) -> np.ndarray:
    return J.entries if isinstance(J, ForestMatrix) else np.asarray(J)


def _is_exact(M: np.ndarray, x) -> bool:
    return M.dtype == object and rq.is_rational_vector(x)


def limiting_state(J, x0: Sequence) -> np.ndarray:
    """``J x0``; exact Fractions when both ``J`` and ``x0`` are rational."""
    M = _matrix(J)
    n = M.shape[0]
    if len(x0) != n:
        raise ValueError(f"x0 has length {len(x0)}, forest matrix is {n}x{n}")
    if _is_exact(M, x0):
        return np.array([sum((M[i, j] * Fraction(x0[j]) for j in range(n)), Fraction(0)) for i in range(n)], dtype=object)
    return rq.to_float(M) @ np.array([float(v) for v in x0])


def _same(a, b, exact: bool, tol: float) -> bool:
    return a == b if exact else abs(float(a) - float(b)) <= tol


@dataclass
class ClauseResult:
    clause: str
    status: str  # "pass" | "fail" | "n/a"
    witnesses: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status != "fail"


@dataclass
class Corollary1Report:
    limit: np.ndarray
    clauses: list[ClauseResult]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.clauses)

    def clause(self, name: str) -> ClauseResult:
        return next(c for c in self.clauses if c.clause == name)


def _component_consensus(g: WeightedDigraph, comp, x0, exact: bool):
    sub, labels = g.subdigraph(comp)
    row = eigenprojection_recursive(laplacian(sub), 1).exact[0]
    if exact:
        return sum((row[k] * Fraction(x0[v]) for k, v in enumerate(labels)), Fraction(0))
    return float(sum(float(row[k]) * float(x0[v]) for k, v in enumerate(labels)))


def check_corollary1(g: WeightedDigraph, J, x0: Sequence, tol: float = CONSENSUS_TOL) -> Corollary1Report:
    """Check the three structural claims about the limit on one concrete instance.

    (i) a basic bicomponent and everything reachable only from it share one
    value, the consensus value of that bicomponent taken alone; (ii) a vertex
    reachable from several basic bicomponents lands between their values,
    strictly when they differ; (iii) initial states outside basic bicomponents
    do not matter.
    """
    M = _matrix(J)
    exact = _is_exact(M, x0)
    dec = bicomponents(g)
    limit = limiting_state(M, x0)
    n = g.n

    # (i)
    res1 = ClauseResult("i", "pass")
    for b in dec.basic:
        comp = dec.components[b]
        anchor = min(comp)
        alone = _component_consensus(g, comp, x0, exact)
        followers = [i for i in range(n) if i in comp or dec.reachable_from[i] == frozenset({b})]
        for i in followers:
            if not (_same(limit[i], limit[anchor], exact, tol) and _same(limit[i], alone, exact, tol)):
                res1.status = "fail"
                res1.witnesses.append(f"vertex {i + 1}: {limit[i]} vs bicomponent value {alone}")
        res1.witnesses.append(f"bicomponent {_label(comp)}: value {_num(alone)} shared by {_label(followers)}")

    # (ii)
    res2 = ClauseResult("ii", "n/a")
    for i in range(n):
        sources = dec.reachable_from[i]
        if len(sources) < 2:
            continue
        values = [limit[min(dec.components[b])] for b in sources]
        lo, hi = min(values), max(values)
        x = limit[i]
        slack = 0 if exact else tol
        inside = lo - slack <= x <= hi + slack
        if lo == hi or (not exact and abs(float(hi) - float(lo)) <= tol):
            verdict = "pass" if inside else "fail"
            res2.witnesses.append(f"vertex {i + 1}: bicomponent values coincide ({_num(lo)}); strictness not applicable")
        else:
            strictly = lo < x < hi if exact else float(lo) + tol < float(x) < float(hi) - tol
            verdict = "pass" if inside and strictly else "fail"
            res2.witnesses.append(f"vertex {i + 1}: {_num(lo)} < {_num(x)} < {_num(hi)} is {strictly}")
        if res2.status != "fail":
            res2.status = verdict

    # (iii)
    res3 = ClauseResult("iii", "n/a")
    basic_vertices = dec.basic_vertices()
    for j in range(n):
        if j in basic_vertices:
            continue
        column_zero = all(M[i, j] == 0 for i in range(n))
        bumped = list(x0)
        bumped[j] = bumped[j] + 1
        moved = limiting_state(M, bumped)
        unchanged = all(_same(a, b, exact, tol) for a, b in zip(moved, limit))
        ok = column_zero and unchanged
        if res3.status != "fail":
            res3.status = "pass" if ok else "fail"
        res3.witnesses.append(f"vertex {j + 1}: column zero={column_zero}, limit unchanged under perturbation={unchanged}")

    return Corollary1Report(limit, [res1, res2, res3])


@dataclass
class TimeShiftReport:
    times: list[float]
    residuals: list[float]
    pair_residuals: dict[tuple[float, float], float]
    tol: float

    @property
    def ok(self) -> bool:
        worst = max(self.residuals + list(self.pair_residuals.values()), default=0.0)
        return worst <= self.tol


def check_time_shift(L, J, x0: Sequence[float], times: Sequence[float], tol: float = SHIFT_TOL) -> TimeShiftReport:
    """``J x(t) = J x(0)`` at each time, and ``J (x(t1) - x(t2)) = 0`` for each pair."""
    Lf = L.as_float() if hasattr(L, "as_float") else np.asarray(L, dtype=float)
    Mf = rq.to_float(_matrix(J))
    x0f = np.array([float(v) for v in x0])
    times = [float(t) for t in times]
    if not all(np.isfinite(times)):
        raise ValueError("times must be finite")
    target = Mf @ x0f
    states = {t: expm(-t * Lf) @ x0f for t in times}
    residuals = [float(np.max(np.abs(Mf @ states[t] - target))) for t in times]
    pairs = {}
    for a in range(len(times)):
        for b in range(a + 1, len(times)):
            t1, t2 = times[a], times[b]
            pairs[(t1, t2)] = float(np.max(np.abs(Mf @ (states[t1] - states[t2]))))
    return TimeShiftReport(times, residuals, pairs, tol)


@dataclass
class ConsensusVerdict:
    d: int
    has_spanning_diverging_tree: bool
    consensus_reached: bool
    consensus_value: object | None
    per_bicomponent_values: dict[frozenset[int], object]
    left_eigenvector: np.ndarray | None
    limit: np.ndarray


def consensus_verdict(g: WeightedDigraph, J, x0: Sequence, tol: float = CONSENSUS_TOL) -> ConsensusVerdict:
    M = _matrix(J)
    exact = _is_exact(M, x0)
    dec = bicomponents(g)
    limit = limiting_state(M, x0)
    if exact:
        reached = all(v == limit[0] for v in limit)
    else:
        reached = bool(np.max(limit) - np.min(limit) <= tol)
    per = {dec.components[b]: limit[min(dec.components[b])] for b in dec.basic}
    v_l = None
    if dec.d == 1:
        v_l = M[0].copy()
        total = sum(v_l, Fraction(0)) if M.dtype == object else float(np.sum(v_l))
        if not _same(total, 1, M.dtype == object, 1e-12):
            raise ArithmeticError(f"row of the forest matrix sums to {total}, not 1")
    return ConsensusVerdict(
        d=dec.d,
        has_spanning_diverging_tree=dec.d == 1,
        consensus_reached=reached,
        consensus_value=limit[0] if reached else None,
        per_bicomponent_values=per,
        left_eigenvector=v_l,
        limit=limit,
    )


def _label(vertices) -> str:
    return "{" + ",".join(str(v + 1) for v in sorted(vertices)) + "}"


def _num(x) -> str:
    return rq.format_fraction(x) if isinstance(x, Fraction) else format(float(x), ".12g")
