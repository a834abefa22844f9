from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kltbench import dualgraph as dg
from kltbench.dualgraph import DualGraph, DynkinType
from kltbench.linalg import matvec

from oracles import chain_discrepancies, chain_gap, continuant

weights = st.integers(min_value=2, max_value=7)
chains = st.lists(weights, min_size=1, max_size=9).map(DualGraph.chain)


@st.composite
def trees(draw, max_size=8):
    n = draw(st.integers(1, max_size))
    ws = draw(st.lists(weights, min_size=n, max_size=n))
    edges = frozenset((draw(st.integers(0, i - 1)), i) for i in range(1, n))
    return DualGraph(tuple(ws), edges)


contractible = trees().filter(lambda g: dg.is_negative_definite(dg.intersection_matrix(g)))


# -- parsing and serialization ---------------------------------------------------


@pytest.mark.parametrize("text, weights", [
    ("[2]", (2,)),
    ("[2^3]", (2, 2, 2)),
    ("[2,3,2^2]", (2, 3, 2, 2)),
    (" [ 3 , 2 ^ 2 ] ", (3, 2, 2)),
    ("[2^2,3,2^0,4]", (2, 2, 3, 4)),
])
def test_parse_chain(text, weights):
    g = dg.parse_graph(text)
    assert g.shape == "chain"
    assert [g.weights[i] for i in g.chain_order()] in (list(weights), list(weights)[::-1])


def test_parse_star():
    g = dg.parse_graph("[2;[2],[2],[2^3]]")
    assert g.shape == "star" and len(g) == 6
    centre, branches = g.star_parts()
    assert g.weights[centre] == 2
    assert sorted(len(b) for b in branches) == [1, 1, 3]


def test_parse_sum_with_multiplicity():
    d = dg.parse_dynkin("2[3]+[2^5]+[3,2^2]")
    assert len(d) == 4
    assert d == DynkinType.of("[2,2,3]", "[3]", "[2^5]", "[3]")
    assert str(d) == "[2^5]+[2^2,3]+2[3]"


def test_empty_input_is_empty_type():
    assert len(dg.parse_dynkin("")) == 0
    assert dg.total_gap("") == 0


@pytest.mark.parametrize("text, fragment", [
    ("[3", "expected ']'"),
    ("[]", "empty chain"),
    ("[1,2]", "< 2"),
    ("[2^0]", "chain of length 0"),
    ("0[2]", "multiplier"),
    ("[2;[2],[]]", "star branch of length 0"),
    ("[2,3;[2],[2],[2]]", "single weight"),
    ("[2]+", "expected '['"),
    ("[2] [3]", "unexpected"),
    ("[a]", "integer"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(dg.DynkinParseError) as info:
        dg.parse_dynkin(text)
    assert fragment in str(info.value)
    assert 0 <= info.value.pos <= len(text)


def test_chain_orientation_is_lexicographically_smaller():
    assert str(dg.parse_graph("[3,2^2]")) == "[2^2,3]"
    assert str(dg.parse_graph("[2,3,2^2]")) == "[2^2,3,2]"


def test_star_with_four_branches_has_no_normal_form():
    g = DualGraph((2, 2, 2, 2, 2), frozenset({(0, 1), (0, 2), (0, 3), (0, 4)}))
    assert g.shape == "tree"
    with pytest.raises(dg.GraphError):
        g.canonical()


def test_rejects_cycles_and_small_weights():
    with pytest.raises(dg.GraphError):
        DualGraph((2, 2, 2), frozenset({(0, 1), (1, 2), (0, 2)}))
    with pytest.raises(dg.GraphError):
        DualGraph.chain([1])


@given(chains)
def test_round_trip_chain(g):
    assert dg.parse_graph(str(g)) == g.canonical()
    assert str(dg.parse_graph(str(g))) == str(g)


@given(st.lists(st.one_of(chains, trees().filter(lambda g: g.shape == "star")), max_size=5))
def test_round_trip_dynkin(graphs):
    d = DynkinType.of(*graphs)
    assert dg.parse_dynkin(str(d)) == d


# -- arithmetic ------------------------------------------------------------------


@pytest.mark.parametrize("text, value", [
    ("[3,2]", "2/5"),
    ("[2,3,2^2]", "6/11"),
    ("[4,2]", "4/7"),
    ("[2,3,2^3]", "4/7"),
    ("[3,3,2]", "8/13"),
    ("[3;[2],[2],[2]]", "2/3"),
    ("[2,3,2,3,2]", "2/3"),
    ("[3]", "1/3"),
    ("[2]", "0"),
])
def test_coefficient_values(text, value):
    assert dg.coefficient(text) == Fraction(value)


@pytest.mark.parametrize("text, value", [
    ("[5]", "-4/5"),
    ("[2,4]", "6/7"),
    ("[4]", "0"),
    ("[2,3,2]", "5/2"),
    ("[2,3,2^4]", "92/17"),
    ("[4,2^2]", "9/5"),
])
def test_gap_values(text, value):
    assert dg.gap(text) == Fraction(value)


def test_determinant_and_vertex_count():
    assert dg.determinant("[2^4]") == 5
    assert dg.determinant("[2;[2],[2^2],[2^4]]") == 1  # E8
    assert dg.vertex_count("[2;[2],[2^2],[2^4]]") == 8
    assert dg.determinant("[2;[2],[2],[2^3]]") == 4  # D6


def test_not_contractible():
    # the affine E6 graph is negative semidefinite only
    with pytest.raises(dg.NotContractibleError):
        dg.discrepancies("[2;[2^2],[2^2],[2^2]]")


def test_boundary_inputs():
    g = dg.parse_graph("[3,2]")
    assert dg.discrepancies_with_boundary(g, {}) == dg.discrepancies(g)
    with pytest.raises(ValueError):
        dg.discrepancies_with_boundary(g, [Fraction(-1), 0])
    with pytest.raises(ValueError):
        dg.discrepancies_with_boundary(g, [0])


def test_spectral_value_chain():
    assert [dg.spectral_value_chain(3, m) for m in range(4)] == [1, 2, 3, 4]
    assert dg.spectral_value_chain(5, 2) == 9
    with pytest.raises(ValueError):
        dg.spectral_value_chain(2, 0)


def test_gap_floor_and_klt():
    assert dg.gap_floor("[5]") == -1
    assert dg.discrepancies("[2,3,2^2]").klt
    assert dg.discrepancies("[4;[2],[2],[2]]").max == Fraction(4, 5)
    assert not dg.discrepancies("[2;[3],[3],[3]]").klt  # log canonical, coefficient 1
    assert not dg.discrepancies("[2;[3],[3],[4]]").klt


# -- families beyond the printed range ---------------------------------------------


@pytest.mark.parametrize("k", range(0, 51))
def test_families_to_k50(k):
    assert dg.gap(DualGraph.chain([3] + [2] * k)) == Fraction(2 * (k + 1) ** 2, 2 * k + 3)
    assert dg.gap(DualGraph.chain([3] + [2] * k + [3])) == k + 1
    assert dg.gap(DualGraph.star(2, [[2], [2], [2] * k + [3]])) == Fraction(2 * k + 7, 2)
    if k:
        assert dg.gap(DualGraph.chain([2] * k)) == k
        assert dg.determinant(DualGraph.chain([2] * k)) == k + 1
    if k >= 4:
        d_k = DualGraph.star(2, [[2], [2], [2] * (k - 3)])
        assert dg.gap(d_k) == k and dg.determinant(d_k) == 4


# -- properties ----------------------------------------------------------------------


@given(contractible)
def test_exact_residual(g):
    m = dg.intersection_matrix(g)
    e = dg.discrepancies(g).values
    assert matvec(m, e) == [2 - w for w in g.weights]


@given(chains)
def test_chain_matches_continuant_oracle(g):
    ws = [g.weights[i] for i in g.chain_order()]
    assert list(dg.discrepancies(g).values) == [chain_discrepancies(ws)[j] for j in range(len(ws))]
    assert dg.gap(g) == chain_gap(ws)
    assert dg.determinant(g) == continuant(ws)


@given(chains)
def test_chain_reversal(g):
    r = g.reversed()
    assert dg.gap(r) == dg.gap(g)
    assert dg.coefficient(r) == dg.coefficient(g)
    assert dg.determinant(r) == dg.determinant(g)
    assert sorted(dg.discrepancies(r).values) == sorted(dg.discrepancies(g).values)
    assert r.canonical() == g.canonical()


@given(st.integers(1, 12))
def test_du_val_chains(n):
    g = DualGraph.chain([2] * n)
    assert dg.is_du_val(g)
    assert not any(dg.discrepancies(g).values)
    assert dg.gap(g) == n


@pytest.mark.parametrize("branches", [[[2], [2], [2] * j] for j in range(1, 9)] + [
    [[2], [2, 2], [2, 2]], [[2], [2, 2], [2, 2, 2]], [[2], [2, 2], [2, 2, 2, 2]]])
def test_du_val_stars(branches):
    g = DualGraph.star(2, branches)
    assert not any(dg.discrepancies(g).values)
    assert dg.gap(g) == len(g)


@given(contractible, st.data())
def test_boundary_monotone(g, data):
    t = data.draw(st.lists(st.fractions(0, 3), min_size=len(g), max_size=len(g)))
    bump = data.draw(st.lists(st.fractions(0, 2), min_size=len(g), max_size=len(g)))
    lo = dg.discrepancies_with_boundary(g, t).values
    hi = dg.discrepancies_with_boundary(g, [a + b for a, b in zip(t, bump)]).values
    assert all(a <= b for a, b in zip(lo, hi))
    assert dg.discrepancies_with_boundary(g, [0] * len(g)) == dg.discrepancies(g)


@given(contractible)
def test_coefficients_in_range(g):
    e = dg.discrepancies(g)
    assert all(0 <= x for x in e.values)
    assert e.max == dg.coefficient(g)


def test_table_fixture():
    rep = dg.verify_table_e35()
    assert rep.ok and len(rep.checks) == 117
