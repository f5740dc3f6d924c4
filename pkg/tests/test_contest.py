from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contestaudit.centipede import make_centipede
from contestaudit.contest import (
    AI,
    H,
    ContestReport,
    ContestSpec,
    GameOutcome,
    outperformance_verdict,
    play_contest,
    stage_games,
)
from contestaudit.strategy import BehavioralStrategy, StrategyError, StrategyProfile, enumerate_pure_strategies, expected_utility

from conftest import all_continue, random_behavioral, trees


def documented_pair():
    ai2 = BehavioralStrategy(2, {"d2": {"C": 1}, "d4": {"S": F(1, 2), "C": F(1, 2)}})
    ai1 = BehavioralStrategy(1, {"d1": {"S": F(3, 4), "C": F(1, 4)}, "d3": {"S": 1}})
    return ai1, ai2


def test_stage_games_swap_roles():
    g1, g2 = stage_games(make_centipede(4))
    assert g1.seats == {1: H, 2: AI} and g2.seats == {1: AI, 2: H}
    # over one stage each party moves first exactly once
    assert sorted([g1.seats[1], g2.seats[1]]) == sorted([H, AI])


def test_always_continue_contest():
    tree = make_centipede(4)
    report = play_contest(ContestSpec(tree, all_continue(tree, 1), all_continue(tree, 2)))
    assert report.g1 == GameOutcome(h=6, ai=5)
    assert report.g2 == GameOutcome(h=6, ai=3)
    assert report.totals == GameOutcome(h=12, ai=8)
    assert report.verdict == "h_outperforms"


def test_always_continue_contest_k3():
    tree = make_centipede(4)
    report = play_contest(ContestSpec(tree, all_continue(tree, 1), all_continue(tree, 2), k=3))
    assert report.totals == GameOutcome(h=36, ai=24)
    assert report.verdict == "h_outperforms"


def test_documented_counterexample_contest():
    ai1, ai2 = documented_pair()
    report = play_contest(ContestSpec(make_centipede(4), ai1, ai2))
    assert report.g1 == GameOutcome(h=F(9, 2), ai=F(11, 2))
    assert report.g2 == GameOutcome(h=F(7, 4), ai=F(7, 4))
    assert report.totals == GameOutcome(h=F(25, 4), ai=F(29, 4))
    assert report.verdict == "ai_outperforms"


@pytest.mark.parametrize(
    "totals, verdict",
    [((12, 8), "h_outperforms"), ((5, 5), "neither"), ((F(25, 4), F(29, 4)), "ai_outperforms")],
)
def test_outperformance_verdict(totals, verdict):
    assert outperformance_verdict(GameOutcome(*totals)) == verdict


def test_spec_validation():
    tree = make_centipede(4)
    with pytest.raises(ValueError):
        ContestSpec(tree, all_continue(tree, 1), all_continue(tree, 2), k=0)
    with pytest.raises(StrategyError):
        ContestSpec(tree, all_continue(tree, 2), all_continue(tree, 1))
    with pytest.raises(StrategyError):
        play_contest(ContestSpec(tree, all_continue(make_centipede(2), 1), all_continue(tree, 2)))


@settings(max_examples=30)
@given(trees(max_decisions=5), st.randoms(use_true_random=False), st.integers(1, 12))
def test_k_invariance_and_linearity(tree, rng, k):
    ai1, ai2 = random_behavioral(rng, tree, 1), random_behavioral(rng, tree, 2)
    one = play_contest(ContestSpec(tree, ai1, ai2))
    many = play_contest(ContestSpec(tree, ai1, ai2, k=k))
    assert many.verdict == one.verdict
    assert many.totals == GameOutcome(k * many.stage.h, k * many.stage.ai)
    assert many.stage == one.stage


@settings(max_examples=30)
@given(trees(max_decisions=5), st.randoms(use_true_random=False))
def test_best_response_is_never_beaten_by_a_pure_alternative(tree, rng):
    ai1, ai2 = random_behavioral(rng, tree, 1), random_behavioral(rng, tree, 2)
    report = play_contest(ContestSpec(tree, ai1, ai2))
    for alt in enumerate_pure_strategies(tree, 1):
        assert expected_utility(tree, StrategyProfile(alt, ai2))[0] <= report.g1.h
    for alt in enumerate_pure_strategies(tree, 2):
        assert expected_utility(tree, StrategyProfile(ai1, alt))[1] <= report.g2.h


@settings(max_examples=30)
@given(trees(max_decisions=5), st.randoms(use_true_random=False))
def test_swapping_parties_transposes_payoffs(tree, rng):
    a1, a2 = random_behavioral(rng, tree, 1), random_behavioral(rng, tree, 2)
    h1, h2 = random_behavioral(rng, tree, 1), random_behavioral(rng, tree, 2)
    original = play_contest(ContestSpec(tree, a1, a2, h_strategies=(h1, h2)))
    swapped = play_contest(ContestSpec(tree, h1, h2, h_strategies=(a1, a2)))
    assert (swapped.totals.h, swapped.totals.ai) == (original.totals.ai, original.totals.h)
    assert swapped.g1 == GameOutcome(h=original.g2.ai, ai=original.g2.h)
    assert swapped.g2 == GameOutcome(h=original.g1.ai, ai=original.g1.h)


@settings(max_examples=30)
@given(trees(max_decisions=5), st.randoms(use_true_random=False))
def test_each_stage_game_reads_only_its_own_ai_strategy(tree, rng):
    a1, a2, b1 = (random_behavioral(rng, tree, s) for s in (1, 2, 1))
    r1 = play_contest(ContestSpec(tree, a1, a2))
    r2 = play_contest(ContestSpec(tree, b1, a2))
    assert r1.g1 == r2.g1 and r1.h_responses[0] == r2.h_responses[0]


def test_report_verdict_from_report():
    tree = make_centipede(2)
    report = play_contest(ContestSpec(tree, all_continue(tree, 1), all_continue(tree, 2)))
    assert isinstance(report, ContestReport)
    assert outperformance_verdict(report) == report.verdict
