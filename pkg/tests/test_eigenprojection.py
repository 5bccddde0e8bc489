from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from forest_consensus import (
    WeightedDigraph,
    eigenprojection_polynomial,
    eigenprojection_recursive,
    eigenprojection_resolvent,
    forest_matrix,
    laplacian,
    max_forest_dimension,
    spectrum_report,
)
from forest_consensus import rational as rq
from forest_consensus.eigenprojection import (
    EigenprojectionError,
    characteristic_polynomial,
    exact_index,
    float_rank,
    squarefree_factors,
)

from conftest import digraphs, seven_j_exact
from oracles import dense_laplacian, minimal_polynomial_roots

HALF = np.full((2, 2), 0.5)


# -- recursive -----------------------------------------------------------------


def test_recursive_seven_exact(seven):
    est = eigenprojection_recursive(laplacian(seven), 2)
    assert est.method == "recursive"
    assert (est.exact == seven_j_exact()).all()
    assert est.residuals == {"row_sum": 0.0, "commutation": 0.0, "idempotency": 0.0}


def test_recursive_seven_float(seven):
    L = laplacian(seven)
    est = eigenprojection_recursive(L, 2, exact=False)
    assert est.exact is None
    assert np.max(np.abs(est.entries - rq.to_float(seven_j_exact()))) < 1e-12
    assert est.within(L)


def test_recursive_edgeless_is_identity():
    est = eigenprojection_recursive(laplacian(WeightedDigraph.edgeless(4)), 4)
    assert (est.exact == rq.identity(4)).all()


def test_recursive_wrong_dimension_reports_step(seven):
    with pytest.raises(EigenprojectionError, match="k=6"):
        eigenprojection_recursive(laplacian(seven), 1)
    with pytest.raises(EigenprojectionError, match="k=6"):
        eigenprojection_recursive(laplacian(seven), 1, exact=False)


def test_recursive_rejects_out_of_range_dimension(two_cycle):
    with pytest.raises(EigenprojectionError):
        eigenprojection_recursive(laplacian(two_cycle), 3)


def test_recursive_exact_needs_rational():
    with pytest.raises(EigenprojectionError):
        eigenprojection_recursive(np.array([[1.0, -1.0], [0.0, 0.0]]), 1, exact=True)


def test_recursive_accepts_float_arrays():
    est = eigenprojection_recursive(np.array([[1.0, -1.0], [0.0, 0.0]]), 1)
    assert np.allclose(est.entries, [[0, 1], [0, 1]])


# -- resolvent -------------------------------------------------------------------


def test_resolvent_seven(seven):
    est = eigenprojection_resolvent(laplacian(seven), [1e6])
    assert np.max(np.abs(est.entries - rq.to_float(seven_j_exact()))) <= 1e-4


def test_resolvent_schedule_shows_first_order_convergence(seven):
    est = eigenprojection_resolvent(laplacian(seven))
    diffs = [d for _, d in est.convergence]
    assert len(diffs) == 4
    for a, b in zip(diffs, diffs[1:]):
        assert 5 < a / b < 20
    assert any("O(1/alpha)" in n for n in est.notes)


def test_resolvent_zero_laplacian():
    est = eigenprojection_resolvent(laplacian(WeightedDigraph.edgeless(3)), [10.0, 1e5])
    assert (est.entries == np.eye(3)).all()


def test_resolvent_two_cycle(two_cycle):
    est = eigenprojection_resolvent(laplacian(two_cycle))
    # (I + aL)^{-1} - J = (I - J) / (1 + 2a) for this L
    assert np.max(np.abs(est.entries - HALF)) == pytest.approx(0.5 / (1 + 2e6), rel=1e-4)


@pytest.mark.parametrize("schedule", [[], [1.0, 0.5], [-1.0]])
def test_resolvent_bad_schedule(two_cycle, schedule):
    with pytest.raises(ValueError):
        eigenprojection_resolvent(laplacian(two_cycle), schedule)


def test_resolvent_singular_reports_alpha():
    # a matrix with eigenvalue -1: I + L is singular at alpha = 1
    with pytest.raises(EigenprojectionError, match="alpha=1"):
        eigenprojection_resolvent(np.array([[-1.0, 0.0], [0.0, 0.0]]), [1.0])


def test_resolvent_warns_on_non_monotone(two_cycle):
    # gaps 1->2->1000 make the second difference larger than the first
    with pytest.warns(RuntimeWarning, match="not monotone"):
        est = eigenprojection_resolvent(laplacian(two_cycle), [1.0, 2.0, 1000.0])
    assert any(n.startswith("warning") for n in est.notes)


# -- polynomial -------------------------------------------------------------------


def test_polynomial_seven_exact(seven):
    est = eigenprojection_polynomial(laplacian(seven), [(2, 1), (3, 1), (5, 3)])
    assert (est.exact == seven_j_exact()).all()
    assert "h(0) = -750" in est.notes


def test_polynomial_seven_float(seven):
    est = eigenprojection_polynomial(laplacian(seven), [(2.0, 1), (3.0, 1), (5.0, 3)])
    assert np.max(np.abs(est.entries - rq.to_float(seven_j_exact()))) <= 1e-9


def test_polynomial_seven_underspecified_index_is_wrong(seven):
    # index 1 for the defective eigenvalue 5 does not annihilate its Jordan block
    est = eigenprojection_polynomial(laplacian(seven), [(2, 1), (3, 1), (5, 1)])
    assert not (est.exact == seven_j_exact()).all()


def test_polynomial_zero_laplacian():
    est = eigenprojection_polynomial(laplacian(WeightedDigraph.edgeless(3)), [])
    assert (est.exact == rq.identity(3)).all()


def test_polynomial_two_cycle(two_cycle):
    # minimal polynomial of [[1,-1],[-1,1]] is x(x-2)
    est = eigenprojection_polynomial(laplacian(two_cycle), [(2, 1)])
    assert (rq.to_float(est.exact) == HALF).all()


def test_polynomial_errors(seven, two_cycle):
    with pytest.raises(EigenprojectionError, match="empty"):
        eigenprojection_polynomial(laplacian(seven), [])
    with pytest.raises(EigenprojectionError, match="zero"):
        eigenprojection_polynomial(laplacian(two_cycle), [(0, 1)])
    with pytest.raises(EigenprojectionError, match="zero"):
        eigenprojection_polynomial(laplacian(two_cycle), [(0.0, 1)])
    with pytest.raises(ValueError):
        eigenprojection_polynomial(laplacian(two_cycle), [(2, 0)])
    with pytest.raises(EigenprojectionError):
        eigenprojection_polynomial(laplacian(two_cycle), [(2.0, 1)], exact=True)


def test_polynomial_complex_roots():
    # directed 3-cycle with unit weights: nonzero eigenvalues 3/2 +- i sqrt(3)/2
    g = WeightedDigraph.from_influence(3, {((k + 1) % 3, k): 1 for k in range(3)})
    L = laplacian(g)
    w = 1.5 + 1j * np.sqrt(3) / 2
    est = eigenprojection_polynomial(L, [(w, 1), (w.conjugate(), 1)])
    assert np.max(np.abs(est.entries - 1 / 3)) < 1e-12


# -- spectrum --------------------------------------------------------------------


def test_spectrum_seven(seven):
    rep = spectrum_report(laplacian(seven))
    assert np.max(np.abs(rep.eigenvalues - np.array([0, 0, 2, 3, 5, 5, 5]))) < 1e-8
    assert rep.index_of_zero == 1
    assert rep.positive_real_part_ok
    assert [m for _, m in rep.multiplicities] == [2, 1, 1, 3]
    assert rep.min_nonzero_real_part == pytest.approx(2.0, abs=1e-12)


def test_spectrum_zero():
    rep = spectrum_report(laplacian(WeightedDigraph.edgeless(3)))
    assert (rep.eigenvalues == 0).all() and rep.index_of_zero == 1
    assert rep.min_nonzero_real_part is None


def test_spectrum_two_cycle(two_cycle):
    rep = spectrum_report(laplacian(two_cycle))
    # char poly x^2 - 2x
    assert rep.characteristic_polynomial == (1, -2, 0)
    assert np.allclose(rep.eigenvalues, [0, 2], atol=1e-14)


def test_spectrum_float_input():
    rep = spectrum_report(np.array([[1.0, -1.0], [-1.0, 1.0]]))
    assert np.allclose(np.sort(rep.eigenvalues.real), [0, 2])
    assert rep.index_of_zero == 1


def test_characteristic_polynomial_matches_numpy(seven):
    L = laplacian(seven)
    cp = [float(c) for c in characteristic_polynomial(L.entries)]
    # expand x^2 (x-2)(x-3)(x-5)^3 independently
    assert np.allclose(cp, np.poly([0, 0, 2, 3, 5, 5, 5]))


def test_squarefree_factors():
    # (x-1)^2 (x-2)^3 (x+4)
    p = np.poly([1, 1, 2, 2, 2, -4])
    coeffs = [Fraction(int(round(c))) for c in p]
    factors = squarefree_factors(coeffs)
    assert {m: [float(c) for c in f] for f, m in factors} == {1: [1.0, 4.0], 2: [1.0, -1.0], 3: [1.0, -2.0]}


def test_index_helpers():
    nil = rq.frac_array([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert exact_index(nil) == 3
    assert exact_index(rq.identity(2)) == 0
    assert float_rank(np.diag([1.0, 1e-20, 0.0])) == 1


# -- cross-route properties ----------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(digraphs(max_n=8, max_arcs=18))
def test_recursive_exact_equals_forest_oracle(g):
    L = laplacian(g)
    est = eigenprojection_recursive(L, max_forest_dimension(g))
    assert (est.exact == forest_matrix(g).entries).all()


@settings(max_examples=60, deadline=None)
@given(digraphs(max_n=8, max_arcs=18))
def test_resolvent_close_to_forest_oracle(g):
    est = eigenprojection_resolvent(laplacian(g), [1e6])
    assert np.max(np.abs(est.entries - forest_matrix(g).as_float())) <= 1e-4


@settings(max_examples=60, deadline=None)
@given(digraphs(max_n=8, max_arcs=18))
def test_polynomial_with_numerical_roots(g):
    L = laplacian(g)
    rep = spectrum_report(L)
    roots = minimal_polynomial_roots(dense_laplacian(g), rep.multiplicities)
    if not roots:
        return
    est = eigenprojection_polynomial(L, roots)
    assert np.max(np.abs(est.entries - forest_matrix(g).as_float())) <= 1e-6


@settings(max_examples=60, deadline=None)
@given(digraphs(max_n=8, max_arcs=18))
def test_residual_tolerances(g):
    L = laplacian(g)
    d = max_forest_dimension(g)
    for est in (eigenprojection_recursive(L, d), eigenprojection_recursive(L, d, exact=False)):
        assert est.within(L)


@settings(max_examples=60, deadline=None)
@given(digraphs(max_n=8, max_arcs=18))
def test_spectrum_properties(g):
    L = laplacian(g)
    rep = spectrum_report(L)
    d = max_forest_dimension(g)
    assert rep.index_of_zero == 1
    assert rep.positive_real_part_ok
    assert dict((v, m) for v, m in rep.multiplicities).get(0j, 0) == d
    assert np.sort_complex(rep.raw_eigenvalues).shape == rep.eigenvalues.shape
    assert rq.rank(L.entries) == g.n - d
