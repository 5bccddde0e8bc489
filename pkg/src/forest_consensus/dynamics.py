"""Continuous consensus dynamics and its DeGroot discretisation."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from . import rational as rq
from .digraph import LaplacianMatrix
from .eigenprojection import eigenprojection_recursive
from .forest import ForestMatrix, max_forest_dimension

DEFAULT_TOL = 1e-9
TAU_GUARD = 1e-12

# degree-13 Pade coefficients for exp, and the 1-norm bound below which no scaling is needed
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0, 10559470521600.0, 670442572800.0, 33522128640.0,
    1323241920.0, 40840800.0, 960960.0, 16380.0, 182.0, 1.0,
)
_THETA13 = 5.371920351148152


class TauBoundError(ValueError):
    pass


def expm(A: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a fixed [13/13] Pade approximant."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    norm = np.linalg.norm(A, 1)
    if not np.isfinite(norm):
        raise FloatingPointError("matrix exponential of a non-finite matrix")
    if norm == 0:
        return np.eye(n)
    s = max(0, int(math.ceil(math.log2(norm / _THETA13)))) if norm > _THETA13 else 0
    A = A / 2.0**s
    b = _PADE13
    I = np.eye(n)
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I)
    V = A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I
    R = np.linalg.solve(V - U, V + U)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(s):
            R = R @ R
    if not np.all(np.isfinite(R)):
        raise FloatingPointError(f"matrix exponential overflowed (1-norm {norm:.3g})")
    return R


def matrix_exponential_action(L, t: float, x0: Sequence[float]) -> np.ndarray:
    """``exp(-L t) x0``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    Lf = L.as_float() if isinstance(L, LaplacianMatrix) else np.asarray(L, dtype=float)
    x0 = _state(x0, Lf.shape[0])
    if t == 0:
        return x0.copy()
    return expm(-t * Lf) @ x0


def _state(x, n: int) -> np.ndarray:
    arr = np.array([float(v) for v in x], dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"state vector has length {arr.size}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("state vector has non-finite entries")
    return arr


def _projection(L: LaplacianMatrix, J) -> np.ndarray:
    if J is not None:
        return J.as_float() if isinstance(J, ForestMatrix) else np.asarray(J, dtype=float)
    if not isinstance(L, LaplacianMatrix) or L.source is None:
        raise ValueError("predicted limit needs the forest matrix or a Laplacian built from a digraph")
    return eigenprojection_recursive(L, max_forest_dimension(L.source)).entries


@dataclass(frozen=True, eq=False)
class TrajectoryReport:
    samples: list[tuple[float, np.ndarray]]
    limit_estimate: np.ndarray
    predicted_limit: np.ndarray
    max_deviation: float
    converged: bool
    mode: str
    steps_taken: int | None = None
    convergence_estimate: float | None = None
    notes: tuple[str, ...] = field(default=())

    def to_csv(self) -> str:
        n = self.limit_estimate.size
        var, clock = ("x", "t") if self.mode == "continuous" else ("y", "k")
        out = io.StringIO()
        out.write(",".join([clock] + [f"{var}{i}" for i in range(1, n + 1)]) + "\n")
        for when, state in self.samples:
            stamp = format(when, ".17g") if self.mode == "continuous" else str(int(when))
            out.write(",".join([stamp] + [format(float(v), ".17g") for v in state]) + "\n")
        return out.getvalue()


def _report(samples, limit, predicted, converged, mode, **extra) -> TrajectoryReport:
    dev = float(np.max(np.abs(limit - predicted))) if limit.size else 0.0
    return TrajectoryReport(samples, limit, predicted, dev, converged, mode, **extra)


def simulate_continuous(L, x0, horizon: float, samples: int, J=None, tol: float = DEFAULT_TOL) -> TrajectoryReport:
    """Sample ``x(t) = exp(-L t) x0`` on an even grid over ``[0, horizon]``."""
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if samples < 2:
        raise ValueError("need at least two samples")
    Lf = L.as_float() if isinstance(L, LaplacianMatrix) else np.asarray(L, dtype=float)
    x0 = _state(x0, Lf.shape[0])
    predicted = _projection(L, J) @ x0
    times = np.linspace(0.0, horizon, samples)
    traj = [(float(t), matrix_exponential_action(Lf, float(t), x0)) for t in times]
    last, prev = traj[-1][1], traj[-2][1]
    step = float(np.max(np.abs(last - prev))) if last.size else 0.0
    near = float(np.max(np.abs(last - predicted))) if last.size else 0.0
    return _report(traj, last, predicted, step < tol and near < tol, "continuous", convergence_estimate=step)


@dataclass(frozen=True, eq=False)
class PerronMatrix:
    """``P = I - tau L``; ``strict`` is None when float tau sits inside the guard band."""

    entries: np.ndarray
    tau: Fraction | float
    strict: bool | None
    bound: Fraction | float
    laplacian: LaplacianMatrix | None = None

    @property
    def exact(self) -> bool:
        return self.entries.dtype == object

    def as_float(self) -> np.ndarray:
        return rq.to_float(self.entries) if self.exact else self.entries

    def is_row_stochastic(self) -> bool:
        if self.exact:
            rows_ok = all(sum(row, Fraction(0)) == 1 for row in self.entries)
            return rows_ok and all(v >= 0 for v in self.entries.reshape(-1))
        P = self.entries
        return bool(np.all(P >= -1e-12) and np.allclose(P.sum(axis=1), 1.0, atol=1e-12))


def perron(L: LaplacianMatrix, tau) -> PerronMatrix:
    """Perron matrix with step ``tau``; refuses a step above ``1 / max_i sum_{j!=i} a_ij``."""
    if isinstance(tau, str):
        tau = Fraction(tau)
    if tau <= 0:
        raise ValueError("tau must be positive")
    top = L.max_out_influence()
    n = L.n
    if isinstance(tau, Rational):
        tau = Fraction(tau)
        bound = Fraction(1) / top if top > 0 else math.inf
        if tau > bound:
            raise TauBoundError(f"tau={rq.format_fraction(tau)} exceeds bound {rq.format_fraction(bound)}")
        P = rq.identity(n) - L.entries * tau
        return PerronMatrix(rq.frozen(P), tau, tau < bound, bound, L)

    tau = float(tau)
    bound = 1.0 / float(top) if top > 0 else math.inf
    if tau > bound * (1 + TAU_GUARD):
        raise TauBoundError(f"tau={tau!r} exceeds bound {bound!r}")
    if math.isfinite(bound) and abs(tau - bound) <= TAU_GUARD * bound:
        strict = None
    else:
        strict = tau < bound
    P = np.eye(n) - tau * L.as_float()
    P.setflags(write=False)
    return PerronMatrix(P, tau, strict, bound, L)


def degroot_iterate(P: PerronMatrix, y0, steps: int, J=None, tol: float = DEFAULT_TOL, record_every: int = 1) -> TrajectoryReport:
    """Power iteration ``y(k) = P y(k-1)``, stopping early once successive iterates agree to ``tol``."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    Pf = P.as_float()
    y = _state(y0, Pf.shape[0])
    predicted = _projection(P.laplacian, J) @ y
    samples = [(0, y.copy())]
    converged = False
    diff = math.inf
    k = 0
    for k in range(1, steps + 1):
        nxt = Pf @ y
        diff = float(np.max(np.abs(nxt - y))) if y.size else 0.0
        y = nxt
        converged = diff < tol
        if k % record_every == 0 or converged or k == steps:
            samples.append((k, y.copy()))
        if converged:
            break
    return _report(samples, y, predicted, converged, "discrete", steps_taken=k, convergence_estimate=diff)


def cesaro_limit(P: PerronMatrix, y0, steps: int, J=None, tol: float = 1e-3, record_every: int = 1) -> TrajectoryReport:
    """Running average ``(1/k) sum_{i=1..k} y(i)``.

    ``convergence_estimate`` is the sup-distance between the averages at
    ``k`` and ``k // 2``; the average converges like ``1/k`` in general.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    Pf = P.as_float()
    y = _state(y0, Pf.shape[0])
    predicted = _projection(P.laplacian, J) @ y
    total = np.zeros_like(y)
    half_avg = None
    samples = [(0, y.copy())]
    avg = y.copy()
    for k in range(1, steps + 1):
        y = Pf @ y
        total += y
        avg = total / k
        if k == max(1, steps // 2):
            half_avg = avg.copy()
        if k % record_every == 0 or k == steps:
            samples.append((k, avg.copy()))
    est = float(np.max(np.abs(avg - half_avg))) if avg.size else 0.0
    return _report(samples, avg, predicted, est < tol, "cesaro", steps_taken=steps, convergence_estimate=est)
