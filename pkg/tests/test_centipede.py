from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from contestaudit.centipede import below_average_bound, is_long, make_centipede
from contestaudit.solvers import backward_induction
from contestaudit.strategy import StrategyProfile
from contestaudit.tree import validate_tree

from conftest import all_stop

EVEN_M = range(2, 41, 2)


def stop_terminals(tree):
    return [tree[d].child("S") for d in tree.decision_nodes()]


def pass_terminal(tree):
    return tree[tree.decision_nodes()[-1]].child("C")


def test_centipede_4_payoffs():
    tree = make_centipede(4)
    assert [tree.payoffs(z) for z in stop_terminals(tree)] == [(2, 1), (1, 4), (4, 3), (3, 6)]
    assert tree.payoffs(pass_terminal(tree)) == (6, 5)


def test_centipede_2_payoffs():
    tree = make_centipede(2)
    assert [tree.payoffs(z) for z in stop_terminals(tree)] == [(2, 1), (1, 4)]
    assert tree.payoffs(pass_terminal(tree)) == (4, 3)


@pytest.mark.parametrize("m", [3, 0, -2, 1])
def test_invalid_m(m):
    with pytest.raises(ValueError):
        make_centipede(m)


@pytest.mark.parametrize("m", EVEN_M)
def test_structure(m):
    tree = make_centipede(m)
    assert validate_tree(tree.to_raw()) == tree
    assert len(tree.decision_nodes()) == m
    assert len(tree.terminals()) == m + 1
    assert [tree[d].owner for d in tree.decision_nodes()] == [1, 2] * (m // 2)
    assert all(tree[d].labels == ("S", "C") for d in tree.decision_nodes())


@pytest.mark.parametrize("m", EVEN_M)
def test_pie_grows(m):
    tree = make_centipede(m)
    totals = [sum(tree.payoffs(z)) for z in stop_terminals(tree)] + [sum(tree.payoffs(pass_terminal(tree)))]
    assert totals == list(range(3, 3 + 2 * (m + 1), 2))


@pytest.mark.parametrize("m", EVEN_M)
def test_continuing_helps_the_other_seat(m):
    tree = make_centipede(m)
    stops = stop_terminals(tree) + [pass_terminal(tree)]
    for t, d in enumerate(tree.decision_nodes()):
        other = 2 - tree[d].owner  # index of the other seat's payoff
        here = tree.payoffs(stops[t])[other]
        assert all(tree.payoffs(z)[other] > here for z in stops[t + 1:])


@pytest.mark.parametrize("m", range(2, 21, 2))
def test_spne_is_all_stop(m):
    tree = make_centipede(m)
    result = backward_induction(tree)
    assert result.profile == StrategyProfile(all_stop(tree, 1), all_stop(tree, 2))
    assert result.payoffs == (2, 1) and result.unique


@pytest.mark.parametrize("m, expected", [(10, True), (8, False), (2, False), (40, True)])
def test_is_long(m, expected):
    assert is_long(m) is expected


def test_is_long_rejects_odd():
    with pytest.raises(ValueError):
        is_long(9)


@pytest.mark.parametrize(
    "m, p, bound, benchmark, verdict",
    [
        (10, F(3, 4), F(9, 2), 5, "below"),
        (8, F(3, 4), 4, 4, "equal"),
        (10, 1, 2, 5, "below"),
        (4, F(3, 4), 3, 2, "above"),
    ],
)
def test_below_average_bound(m, p, bound, benchmark, verdict):
    result = below_average_bound(m, p)
    assert (result.bound, result.benchmark, result.verdict) == (bound, benchmark, verdict)


def test_bound_rejects_bad_probability():
    with pytest.raises(ValueError):
        below_average_bound(10, F(5, 4))
    with pytest.raises(ValueError):
        below_average_bound(10, -F(1, 4))


@pytest.mark.parametrize("m", EVEN_M)
def test_bound_endpoints(m):
    assert below_average_bound(m, 0).bound == m + 2
    assert below_average_bound(m, 1).bound == 2


@given(
    st.sampled_from(list(EVEN_M)),
    st.fractions(min_value=0, max_value=1),
    st.fractions(min_value=0, max_value=1),
)
def test_bound_strictly_decreasing(m, p, q):
    if p < q:
        assert below_average_bound(m, p).bound > below_average_bound(m, q).bound


@pytest.mark.parametrize("m", [4, 10])
def test_bound_is_a_true_upper_bound_at_grid_points(m):
    # seat 1's best payoff given the root stop probability: stop w.p. p, best terminal otherwise
    tree = make_centipede(m)
    best_elsewhere = max(tree.payoffs(z)[0] for z in tree.terminals()[1:])
    for j in range(5):
        p = F(j, 4)
        assert below_average_bound(m, p).bound == p * 2 + (1 - p) * best_elsewhere
