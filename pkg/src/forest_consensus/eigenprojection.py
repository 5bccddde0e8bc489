"""Eigenprojection of a Laplacian at eigenvalue zero.

Three independent routes are provided: the trace recursion, the resolvent
limit ``(I + alpha L)^{-1}``, and the polynomial formula built from the nonzero
roots of the minimal polynomial.  Each returns a :class:`ProjectionEstimate`
carrying its own residuals so results can be judged without an oracle.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from . import rational as rq
from .digraph import LaplacianMatrix

DEFAULT_ALPHAS = (1e2, 1e3, 1e4, 1e5, 1e6)


class EigenprojectionError(ArithmeticError):
    pass


class SpectrumError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Tolerances:
    row_sum: float = 1e-8
    commutation: float = 1e-6  # relative to max |L_ij|
    idempotency: float = 1e-8
    trace_floor: float = 1e-12


@dataclass(frozen=True, eq=False)
class ProjectionEstimate:
    entries: np.ndarray
    method: str
    row_sum_residual: float
    commutation_residual: float
    idempotency_residual: float
    exact: np.ndarray | None = None
    notes: tuple[str, ...] = ()
    convergence: tuple[tuple[float, float], ...] = ()

    @property
    def residuals(self) -> dict[str, float]:
        return {
            "row_sum": self.row_sum_residual,
            "commutation": self.commutation_residual,
            "idempotency": self.idempotency_residual,
        }

    def within(self, L, tol: Tolerances = Tolerances()) -> bool:
        scale = float(np.max(np.abs(_float(L)))) if _float(L).size else 0.0
        return (
            self.row_sum_residual <= tol.row_sum
            and self.commutation_residual <= tol.commutation * max(scale, 1.0)
            and self.idempotency_residual <= tol.idempotency
        )


def _exact(L) -> np.ndarray | None:
    if isinstance(L, LaplacianMatrix):
        return L.entries
    arr = np.asarray(L)
    if arr.dtype == object and all(isinstance(v, Rational) for v in arr.reshape(-1)):
        return arr
    return None


def _float(L) -> np.ndarray:
    if isinstance(L, LaplacianMatrix):
        return L.as_float()
    return np.asarray(L, dtype=float)


def _residuals(Lf: np.ndarray, Z: np.ndarray) -> tuple[float, float, float]:
    n = Z.shape[0]
    if n == 0:
        return 0.0, 0.0, 0.0
    row = float(np.max(np.abs(Z.sum(axis=1) - 1.0)))
    comm = float(np.max(np.abs(Lf @ Z)))
    idem = float(np.max(np.abs(Z @ Z - Z)))
    return row, comm, idem


def exact_residuals(Le: np.ndarray, Ze: np.ndarray) -> tuple[float, float, float]:
    n = Ze.shape[0]
    ones = np.array([Fraction(1)] * n, dtype=object)
    row = max((abs(s - 1) for s in Ze @ ones), default=Fraction(0))
    comm = max((abs(v) for v in rq.matmul(Le, Ze).reshape(-1)), default=Fraction(0))
    idem = max((abs(v) for v in (rq.matmul(Ze, Ze) - Ze).reshape(-1)), default=Fraction(0))
    return float(row), float(comm), float(idem)


def _estimate(L, Z, method, exact=None, notes=(), convergence=()) -> ProjectionEstimate:
    if exact is not None:
        res = exact_residuals(_exact(L), exact)
        Z = rq.to_float(exact)
    else:
        res = _residuals(_float(L), Z)
    return ProjectionEstimate(Z, method, *res, exact=exact, notes=tuple(notes), convergence=tuple(convergence))


def eigenprojection_recursive(L, d: int, exact: bool | None = None, tol: Tolerances = Tolerances()) -> ProjectionEstimate:
    """``J_k = I - k L J_{k-1} / tr(L J_{k-1})`` for ``k = 1..n-d``, starting from ``J_0 = I``.

    Needs only the out-forest dimension ``d``, no eigenvalues.  Exact rational
    arithmetic is used whenever ``L`` is rational unless ``exact=False``.
    """
    Le = _exact(L)
    use_exact = Le is not None if exact is None else exact
    if use_exact and Le is None:
        raise EigenprojectionError("exact mode requested but L is not rational")
    n = _float(L).shape[0]
    if not 0 <= d <= n:
        raise EigenprojectionError(f"out-forest dimension {d} outside 0..{n}")

    if use_exact:
        J = rq.identity(n)
        for k in range(1, n - d + 1):
            LJ = rq.matmul(Le, J)
            tr = rq.trace(LJ)
            if tr == 0:
                raise EigenprojectionError(f"tr(L J_{k - 1}) vanished at step k={k}; d={d} is inconsistent with L")
            J = rq.identity(n) - LJ * Fraction(k) / tr
        return _estimate(L, None, "recursive", exact=rq.frozen(J))

    Lf = _float(L)
    J = np.eye(n)
    scale = max(float(np.max(np.abs(Lf))), 1.0) if n else 1.0
    for k in range(1, n - d + 1):
        LJ = Lf @ J
        tr = np.trace(LJ)
        if abs(tr) < tol.trace_floor * scale:
            raise EigenprojectionError(
                f"|tr(L J_{k - 1})| = {abs(tr):.3g} below tolerance at step k={k}; "
                f"d={d} is inconsistent or rounding is pathological"
            )
        J = np.eye(n) - k * LJ / tr
    return _estimate(L, J, "recursive")


def eigenprojection_resolvent(L, alpha_schedule: Sequence[float] = DEFAULT_ALPHAS, monotone_slack: float = 1e-9) -> ProjectionEstimate:
    """``(I + alpha L)^{-1}`` at the largest alpha; error decays like ``1/alpha``."""
    alphas = list(alpha_schedule)
    if not alphas:
        raise ValueError("alpha schedule must be nonempty")
    if any(a <= 0 for a in alphas) or any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alpha schedule must be positive and strictly increasing")
    Lf = _float(L)
    n = Lf.shape[0]
    previous = None
    convergence = []
    notes = []
    Z = np.eye(n)
    for alpha in alphas:
        try:
            Z = np.linalg.solve(np.eye(n) + alpha * Lf, np.eye(n))
        except np.linalg.LinAlgError as exc:
            raise EigenprojectionError(f"I + alpha L is singular at alpha={alpha:g}") from exc
        if previous is not None:
            convergence.append((alpha, float(np.max(np.abs(Z - previous)))))
        previous = Z
    diffs = [c for _, c in convergence]
    if any(b > a + monotone_slack for a, b in zip(diffs, diffs[1:])):
        msg = "successive resolvent differences are not monotone decreasing"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append("warning: " + msg)
    notes.append(f"value at alpha={alphas[-1]:g}; first-order error O(1/alpha), not extrapolated")
    return _estimate(L, Z, "resolvent", notes=notes, convergence=convergence)


def eigenprojection_polynomial(L, roots: Sequence[tuple[object, int]], exact: bool | None = None) -> ProjectionEstimate:
    """``prod_k (L - l_k I)^{v_k} / prod_k (-l_k)^{v_k}`` over caller-supplied nonzero roots.

    ``roots`` must be the nonzero roots of the minimal polynomial with their
    indices.  Overshooting an index is harmless; missing a root is not.
    """
    Le = _exact(L)
    Lf = _float(L)
    n = Lf.shape[0]
    roots = [(value, int(nu)) for value, nu in roots]
    if any(nu < 1 for _, nu in roots):
        raise ValueError("root indices must be >= 1")
    if not roots and np.any(Lf != 0):
        raise EigenprojectionError("empty root list but L is nonzero")
    rational_roots = all(isinstance(v, Rational) for v, _ in roots)
    use_exact = (Le is not None and rational_roots) if exact is None else exact
    if use_exact and (Le is None or not rational_roots):
        raise EigenprojectionError("exact mode needs a rational L and rational roots")

    if use_exact:
        C = rq.identity(n)
        h0 = Fraction(1)
        for value, nu in roots:
            lam = Fraction(value)
            shifted = Le - rq.identity(n) * lam
            for _ in range(nu):
                C = rq.matmul(C, shifted)
            h0 *= (-lam) ** nu
        if h0 == 0:
            raise EigenprojectionError("a supplied root is zero; denominator vanishes")
        Z = C / h0
        return _estimate(L, None, "polynomial", exact=rq.frozen(Z), notes=[f"h(0) = {rq.format_fraction(h0)}"])

    C = np.eye(n, dtype=complex)
    h0 = complex(1.0)
    for value, nu in roots:
        lam = complex(value)
        shifted = Lf - lam * np.eye(n)
        for _ in range(nu):
            C = C @ shifted
        h0 *= (-lam) ** nu
    if h0 == 0:
        raise EigenprojectionError("a supplied root is zero; denominator vanishes")
    Zc = C / h0
    notes = [f"h(0) = {h0.real:.17g}" if h0.imag == 0 else f"h(0) = {h0}"]
    imag = float(np.max(np.abs(Zc.imag))) if n else 0.0
    if imag > 0:
        notes.append(f"discarded imaginary part of size {imag:.3g}")
    return _estimate(L, Zc.real.copy(), "polynomial", notes=notes)


# -- spectrum ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    multiplicities: tuple[tuple[complex, int], ...]
    index_of_zero: int
    positive_real_part_ok: bool
    raw_eigenvalues: np.ndarray = field(repr=False, default=None)
    characteristic_polynomial: tuple[Fraction, ...] = field(repr=False, default=())

    @property
    def nonzero(self) -> list[tuple[complex, int]]:
        return [(v, m) for v, m in self.multiplicities if v != 0]

    @property
    def min_nonzero_real_part(self) -> float | None:
        vals = [v.real for v, _ in self.nonzero]
        return min(vals) if vals else None


def characteristic_polynomial(A: np.ndarray) -> list[Fraction]:
    """Coefficients of ``det(xI - A)``, highest degree first (Faddeev-LeVerrier, exact)."""
    n = A.shape[0]
    coeffs = [Fraction(1)]
    M = rq.zeros(n)
    I = rq.identity(n)
    for k in range(1, n + 1):
        M = rq.matmul(A, M) + I * coeffs[-1]
        coeffs.append(-rq.trace(rq.matmul(A, M)) / k)
    return coeffs


def _poly_trim(p: list[Fraction]) -> list[Fraction]:
    i = 0
    while i < len(p) - 1 and p[i] == 0:
        i += 1
    return p[i:]


def _poly_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = _poly_trim(list(a))
    b = _poly_trim(list(b))
    if len(a) < len(b):
        return [Fraction(0)], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    r = list(a)
    for k in range(len(q)):
        coef = r[k] / b[0]
        q[k] = coef
        for j in range(len(b)):
            r[k + j] -= coef * b[j]
    rem = _poly_trim(r[len(q):] or [Fraction(0)])
    return q, rem


def _poly_monic(p: list[Fraction]) -> list[Fraction]:
    p = _poly_trim(p)
    return [c / p[0] for c in p]


def _poly_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a, b = _poly_trim(a), _poly_trim(b)
    while not (len(b) == 1 and b[0] == 0):
        _, r = _poly_divmod(a, b)
        a, b = b, r
    return _poly_monic(a)


def _poly_deriv(p: list[Fraction]) -> list[Fraction]:
    deg = len(p) - 1
    return [c * (deg - k) for k, c in enumerate(p[:-1])] or [Fraction(0)]


def squarefree_factors(p: list[Fraction]) -> list[tuple[list[Fraction], int]]:
    """Yun's algorithm over Q: ``p = prod a_i^i`` with each ``a_i`` squarefree and coprime."""
    p = _poly_monic(p)
    if len(p) == 1:
        return []
    out = []
    a = _poly_gcd(p, _poly_deriv(p))
    b, _ = _poly_divmod(p, a)
    c, _ = _poly_divmod(_poly_deriv(p), a)
    d = [x - y for x, y in zip(_pad(c, len(b)), _pad(_poly_deriv(b), len(b)))]
    i = 1
    while len(_poly_trim(b)) > 1:
        a = _poly_gcd(b, d)
        b, _ = _poly_divmod(b, a)
        c, _ = _poly_divmod(d, a)
        if len(a) > 1:
            out.append((a, i))
        d = [x - y for x, y in zip(_pad(c, len(b)), _pad(_poly_deriv(b), len(b)))]
        i += 1
    return out


def _pad(p: list[Fraction], length: int) -> list[Fraction]:
    p = _poly_trim(p)
    return [Fraction(0)] * (length - len(p)) + p if len(p) < length else p


def _polish_roots(poly: list[Fraction], approx: np.ndarray, steps: int = 3) -> np.ndarray:
    coeffs = np.array([complex(c) for c in poly])
    deriv = np.polyder(coeffs)
    out = []
    for z in approx:
        for _ in range(steps):
            dz = np.polyval(deriv, z)
            if dz == 0:
                break
            step = np.polyval(coeffs, z) / dz
            if not np.isfinite(step):
                break
            z = z - step
        out.append(z)
    return np.array(out, dtype=complex)


def _clean(z: complex, scale: float) -> complex:
    re, im = z.real, z.imag
    if abs(im) <= 1e-13 * scale:
        im = 0.0
    if abs(re) <= 1e-13 * scale:
        re = 0.0
    return complex(re, im)


def exact_index(A: np.ndarray) -> int:
    """Smallest ``k`` with ``rank A^{k+1} = rank A^k`` (exact)."""
    k = 0
    power = rq.identity(A.shape[0])
    r = A.shape[0]
    while True:
        nxt = rq.matmul(power, A)
        r_next = rq.rank(nxt)
        if r_next == r:
            return k
        k += 1
        power, r = nxt, r_next


def float_rank(A: np.ndarray, rtol: float | None = None) -> int:
    """Numerical rank with singular-value threshold ``n * eps * sigma_max`` by default."""
    A = np.asarray(A)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0:
        return 0
    rtol = max(A.shape) * np.finfo(float).eps if rtol is None else rtol
    return int(np.sum(s > rtol * s[0]))


def spectrum_report(L, real_tol: float = 1e-9) -> SpectrumReport:
    """Eigenvalues with multiplicities, the index of the zero eigenvalue, and the sign check.

    A dense solver supplies the raw spectrum.  Defective eigenvalues come back
    from it perturbed by roughly ``eps^(1/m)``, so the reported values are the
    roots of the squarefree parts of the exact characteristic polynomial, which
    are simple and therefore well conditioned; the multiplicities are exact.
    """
    Lf = _float(L)
    Le = _exact(L)
    n = Lf.shape[0]
    try:
        raw = np.linalg.eigvals(Lf)
    except np.linalg.LinAlgError as exc:
        raise SpectrumError(f"dense eigen-solver did not converge: {exc}") from exc
    if Le is None:
        # float input: no exact refinement available
        index = _float_index(Lf)
        ok = all(v.real > -real_tol for v in raw if abs(v) > real_tol)
        return SpectrumReport(np.sort_complex(raw), (), index, ok, raw_eigenvalues=raw)

    charpoly = characteristic_polynomial(Le)
    scale = max(1.0, float(np.max(np.abs(Lf)))) if n else 1.0
    zero_mult = 0
    p = list(charpoly)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
        zero_mult += 1
    mults: list[tuple[complex, int]] = []
    if zero_mult:
        mults.append((0j, zero_mult))
    for factor, m in squarefree_factors(p):
        approx = np.roots(np.array([float(c) for c in factor]))
        for z in _polish_roots(factor, approx):
            mults.append((_clean(complex(z), scale), m))
    mults.sort(key=lambda vm: (vm[0].real, vm[0].imag))
    values = np.array([v for v, m in mults for _ in range(m)], dtype=complex)
    if len(values) != n:
        raise SpectrumError(f"recovered {len(values)} eigenvalues for an {n}x{n} matrix")
    index = exact_index(Le)
    ok = all(v.real > -real_tol for v, _ in mults if v != 0)
    return SpectrumReport(values, tuple(mults), index, ok, raw_eigenvalues=raw, characteristic_polynomial=tuple(charpoly))


def _float_index(Lf: np.ndarray) -> int:
    n = Lf.shape[0]
    k, power, r = 0, np.eye(n), n
    while True:
        nxt = power @ Lf
        r_next = float_rank(nxt)
        if r_next == r:
            return k
        k, power, r = k + 1, nxt, r_next
