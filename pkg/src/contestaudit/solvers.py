"""Backward induction, best responses and equilibrium checks."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .realization import PayoffTable
from .strategy import (
    BehavioralStrategy,
    MixedStrategy,
    PureStrategy,
    Strategy,
    StrategyError,
    StrategyProfile,
    as_behavioral,
    check_strategy,
    enumerate_pure_strategies,
    expected_utility,
    restrict,
)
from .tree import DecisionNode, GameTree, subgame

DEFAULT_NASH_CAP = 2**20


class BudgetExceeded(RuntimeError):
    """A brute-force enumeration would exceed its configured cap."""


@dataclass(frozen=True)
class SolveResult:
    profile: StrategyProfile
    payoffs: tuple[Fraction, Fraction]
    unique: bool


@dataclass(frozen=True)
class BestResponseResult:
    seat: int
    strategy: PureStrategy
    value: Fraction
    ties: int


@dataclass(frozen=True)
class NashVerdict:
    is_nash: bool
    max_gain: Fraction
    gains: tuple[Fraction, Fraction]
    deviation: PureStrategy | None = None


@dataclass(frozen=True)
class SpneVerdict:
    is_spne: bool
    witness: str | None = None
    detail: NashVerdict | None = None


def _argmax_first(values: list[Fraction]) -> tuple[int, bool]:
    best = max(values)
    first = values.index(best)
    return first, values.count(best) > 1


def backward_induction(tree: GameTree) -> SolveResult:
    """Solve leaves-up; ties go to the first declared action and clear ``unique``."""
    values: dict[str, tuple[Fraction, Fraction]] = {}
    choices: dict[int, dict[str, str]] = {1: {}, 2: {}}
    unique = True
    for node_id in reversed(list(tree.nodes)):
        node = tree[node_id]
        if not isinstance(node, DecisionNode):
            values[node_id] = tree.payoffs(node_id)
            continue
        owner_values = [values[a.child][node.owner - 1] for a in node.actions]
        i, tied = _argmax_first(owner_values)
        unique = unique and not tied
        choices[node.owner][node_id] = node.actions[i].label
        values[node_id] = values[node.actions[i].child]
    profile = StrategyProfile(
        PureStrategy(1, {n: choices[1][n] for n in tree.decision_nodes(1)}),
        PureStrategy(2, {n: choices[2][n] for n in tree.decision_nodes(2)}),
    )
    return SolveResult(profile, values[tree.root], unique)


def best_response(tree: GameTree, seat: int, opponent: Strategy) -> BestResponseResult:
    """Pure best response of ``seat`` to a fixed opponent strategy.

    Opponent nodes are chance-like branch points weighted by the opponent's
    behavioral probabilities; mixed opponents are converted first, which is
    exact because the tree has perfect recall.
    """
    if seat not in (1, 2):
        raise StrategyError(f"seat must be 1 or 2, got {seat!r}")
    if opponent.seat == seat:
        raise StrategyError(f"opponent strategy belongs to seat {opponent.seat}, the responding seat")
    check_strategy(tree, opponent)
    opp = as_behavioral(tree, opponent)
    idx = seat - 1
    values: dict[str, Fraction] = {}
    choices: dict[str, str] = {}
    ties = 0
    for node_id in reversed(list(tree.nodes)):
        node = tree[node_id]
        if not isinstance(node, DecisionNode):
            values[node_id] = tree.payoffs(node_id)[idx]
        elif node.owner == seat:
            i, tied = _argmax_first([values[a.child] for a in node.actions])
            ties += tied
            choices[node_id] = node.actions[i].label
            values[node_id] = values[node.actions[i].child]
        else:
            dist = opp.distribution(node_id)
            values[node_id] = sum(
                (p * values[node.child(label)] for label, p in dist.items()), Fraction(0)
            )
    ordered = {n: choices[n] for n in tree.decision_nodes(seat)}
    return BestResponseResult(seat, PureStrategy(seat, ordered), values[tree.root], ties)


def is_nash(tree: GameTree, profile: StrategyProfile) -> NashVerdict:
    current = expected_utility(tree, profile)
    gains = []
    deviation = None
    best_gain = Fraction(0)
    for seat in (1, 2):
        br = best_response(tree, seat, profile[3 - seat])
        gain = br.value - current[seat - 1]
        gains.append(gain)
        if gain > best_gain:
            best_gain, deviation = gain, br.strategy
    return NashVerdict(best_gain == 0, best_gain, (gains[0], gains[1]), deviation)


def is_spne(tree: GameTree, profile: StrategyProfile) -> SpneVerdict:
    """Nash check in every subgame, deepest first; the witness is the first failing node found."""
    first, second = (
        as_behavioral(tree, s) if isinstance(s, MixedStrategy) else s
        for s in (profile.first, profile.second)
    )
    for s in (first, second):
        check_strategy(tree, s)
    for node_id in reversed(tree.decision_nodes()):
        sub = subgame(tree, node_id)
        verdict = is_nash(sub, StrategyProfile(restrict(first, sub), restrict(second, sub)))
        if not verdict.is_nash:
            return SpneVerdict(False, node_id, verdict)
    return SpneVerdict(True)


def pure_nash_table(
    tree: GameTree, cap: int = DEFAULT_NASH_CAP
) -> tuple[list[PureStrategy], list[PureStrategy], PayoffTable, np.ndarray]:
    """Pure strategies of both seats, their payoff table, and the equilibrium mask.

    A pair is an equilibrium when neither entry can be beaten within its
    column (seat 1) or row (seat 2). Pure strategies suffice as deviations, so
    this agrees with :func:`is_nash` without running the backward DP.
    """
    s1 = enumerate_pure_strategies(tree, 1)
    s2 = enumerate_pure_strategies(tree, 2)
    total = len(s1) * len(s2)
    if total > cap:
        raise BudgetExceeded(f"{total} pure profiles exceed the cap of {cap}")
    table = PayoffTable(tree, s1, s2)
    u1, u2 = table.num
    stable = (u1 == u1.max(axis=0, keepdims=True)) & (u2 == u2.max(axis=1, keepdims=True))
    return s1, s2, table, stable


def enumerate_pure_nash(
    tree: GameTree, cap: int = DEFAULT_NASH_CAP
) -> list[tuple[StrategyProfile, tuple[Fraction, Fraction]]]:
    """Every pure Nash equilibrium with its outcome, seat-1 strategy order first."""
    s1, s2, table, stable = pure_nash_table(tree, cap)
    return [
        (StrategyProfile(s1[a], s2[b]), (table.value(1, a, b), table.value(2, a, b)))
        for a, b in zip(*np.nonzero(stable))
    ]
