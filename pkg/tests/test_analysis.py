from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forest_consensus import (
    Arc,
    WeightedDigraph,
    bicomponents,
    check_corollary1,
    check_time_shift,
    consensus_verdict,
    forest_matrix,
    laplacian,
    limiting_state,
)
from forest_consensus import rational as rq

from conftest import digraphs

F = Fraction


def test_limit_first_example(seven):
    J = forest_matrix(seven)
    assert list(limiting_state(J, [1, 10, 5, 7, 9, 0, 0])) == [7] * 7


def test_limit_second_example(seven):
    J = forest_matrix(seven)
    lim = limiting_state(J, [0, 6, 3, 9, 10, 0, 0])
    assert list(lim) == [4, 4, 7, 7, 7, F(26, 5), F(166, 25)]
    assert all(isinstance(v, Fraction) for v in lim)


@settings(max_examples=30, deadline=None)
@given(st.fractions(-100, 100, max_denominator=50), st.fractions(-100, 100, max_denominator=50))
def test_free_slots_never_matter(a, b):
    J = forest_matrix(WeightedDigraph.from_influence(7, _SEVEN_INFLUENCE))
    assert list(limiting_state(J, [0, 6, 3, 9, 10, a, b])) == [4, 4, 7, 7, 7, F(26, 5), F(166, 25)]


_SEVEN_INFLUENCE = {
    (0, 1): 2, (1, 0): 1, (2, 4): 1, (3, 2): 2, (3, 4): 2,
    (4, 3): 2, (5, 1): 3, (5, 2): 2, (6, 2): 4, (6, 5): 1,
}


def test_limit_float_path(seven):
    lim = limiting_state(forest_matrix(seven).as_float(), [0, 6, 3, 9, 10, 0.5, 0])
    assert lim.dtype == float
    assert np.allclose(lim, [4, 4, 7, 7, 7, 5.2, 6.64], rtol=0, atol=1e-12)


def test_limit_length_check(seven):
    with pytest.raises(ValueError, match="length 3"):
        limiting_state(forest_matrix(seven), [1, 2, 3])


# -- structural claims ---------------------------------------------------------------


def test_corollary_seven(seven):
    rep = check_corollary1(seven, forest_matrix(seven), [0, 6, 3, 9, 10, 0, 0])
    assert rep.ok
    assert [c.status for c in rep.clauses] == ["pass", "pass", "pass"]
    assert any("4 < 26/5 < 7 is True" in w for w in rep.clause("ii").witnesses)
    assert any("4 < 166/25 < 7 is True" in w for w in rep.clause("ii").witnesses)
    zero_cols = [w for w in rep.clause("iii").witnesses if "column zero=True" in w]
    assert [w.split(":")[0] for w in zero_cols] == ["vertex 6", "vertex 7"]


def test_corollary_seven_equal_bicomponent_values(seven):
    rep = check_corollary1(seven, forest_matrix(seven), [1, 10, 5, 7, 9, 0, 0])
    assert rep.ok
    assert all("not applicable" in w for w in rep.clause("ii").witnesses)


def test_corollary_strongly_connected(two_cycle):
    rep = check_corollary1(two_cycle, forest_matrix(two_cycle), [F(1), F(3)])
    assert rep.clause("i").status == "pass"
    assert rep.clause("ii").status == "n/a"
    assert rep.clause("iii").status == "n/a"


def test_corollary_detects_wrong_matrix(seven):
    # an identity "projection" breaks clause (i) and the zero columns of (iii)
    rep = check_corollary1(seven, rq.identity(7), [0, 6, 3, 9, 10, 0, 0])
    assert not rep.ok
    assert rep.clause("i").status == "fail"
    assert rep.clause("iii").status == "fail"


def test_corollary_float_path(seven):
    rep = check_corollary1(seven, forest_matrix(seven).as_float(), [0.0, 6.0, 3.0, 9.0, 10.0, 1.5, -2.0])
    assert rep.ok


@settings(max_examples=60, deadline=None)
@given(digraphs(max_n=7, max_arcs=14), st.lists(st.fractions(-20, 20, max_denominator=7), min_size=7, max_size=7))
def test_corollary_holds_on_random_digraphs(g, values):
    x0 = values[: g.n]
    rep = check_corollary1(g, forest_matrix(g), x0)
    assert rep.ok, [c for c in rep.clauses if not c.ok]


# -- time shift -------------------------------------------------------------------------


def test_time_shift_seven(seven):
    rep = check_time_shift(laplacian(seven), forest_matrix(seven), [1, 10, 5, 7, 9, 0, 0], [0, 1, 5])
    assert rep.ok
    assert max(rep.residuals) < 1e-8
    assert rep.residuals[0] == 0.0
    assert len(rep.pair_residuals) == 3


def test_time_shift_equal_times_is_zero(seven):
    rep = check_time_shift(laplacian(seven), forest_matrix(seven), [0, 6, 3, 9, 10, 0, 0], [2.5, 2.5])
    assert rep.pair_residuals[(2.5, 2.5)] == 0.0


def test_time_shift_zero_laplacian():
    g = WeightedDigraph.edgeless(3)
    rep = check_time_shift(laplacian(g), forest_matrix(g), [1, -2, 4], [0, 3, 100])
    assert rep.ok and max(rep.residuals) == 0.0


def test_time_shift_rejects_infinite_time(seven):
    with pytest.raises(ValueError):
        check_time_shift(laplacian(seven), forest_matrix(seven), [0] * 7, [float("inf")])


@settings(max_examples=40, deadline=None)
@given(digraphs(max_n=7, max_arcs=14), st.integers(0, 2**31))
def test_time_shift_random(g, seed):
    x0 = np.random.default_rng(seed).uniform(-5, 5, g.n)
    assert check_time_shift(laplacian(g), forest_matrix(g), x0, [0.0, 0.5, 3.0, 20.0]).ok


# -- consensus verdict -----------------------------------------------------------------


def test_verdict_seven(seven):
    J = forest_matrix(seven)
    v = consensus_verdict(seven, J, [1, 10, 5, 7, 9, 0, 0])
    assert v.d == 2 and not v.has_spanning_diverging_tree
    assert v.consensus_reached and v.consensus_value == 7
    assert v.left_eigenvector is None
    w = consensus_verdict(seven, J, [0, 6, 3, 9, 10, 0, 0])
    assert not w.consensus_reached and w.consensus_value is None
    assert w.per_bicomponent_values == {frozenset({0, 1}): 4, frozenset({2, 3, 4}): 7}


def test_verdict_single_vertex():
    g = WeightedDigraph.edgeless(1)
    v = consensus_verdict(g, forest_matrix(g), [F(5, 3)])
    assert v.d == 1 and v.has_spanning_diverging_tree
    assert v.consensus_value == F(5, 3)
    assert list(v.left_eigenvector) == [1]


def test_verdict_path():
    g = WeightedDigraph(3, [Arc(0, 1, F(1)), Arc(1, 2, F(1))])
    v = consensus_verdict(g, forest_matrix(g), [2, 9, -4])
    assert v.d == 1 and v.consensus_value == 2
    assert list(v.left_eigenvector) == [1, 0, 0]


@settings(max_examples=60, deadline=None)
@given(digraphs(max_n=7, max_arcs=16), st.lists(st.fractions(-9, 9, max_denominator=5), min_size=7, max_size=7))
def test_verdict_left_eigenvector(g, values):
    J = forest_matrix(g)
    v = consensus_verdict(g, J, values[: g.n])
    assert v.has_spanning_diverging_tree == (bicomponents(g).d == 1)
    if v.d != 1:
        assert v.left_eigenvector is None
        return
    assert v.consensus_reached
    vl = v.left_eigenvector
    assert sum(vl) == 1 and all(c >= 0 for c in vl)
    L = laplacian(g).entries
    assert all(sum(vl[i] * L[i, j] for i in range(g.n)) == 0 for j in range(g.n))
    assert v.consensus_value == sum(vl[j] * values[j] for j in range(g.n))
