"""Role-swapped repeated contests between a best-responding human and a committed AI."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .solvers import best_response
from .strategy import Strategy, StrategyError, StrategyProfile, check_strategy, expected_utility
from .tree import GameTree

H = "H"
AI = "AI"

Verdict = Literal["h_outperforms", "ai_outperforms", "neither"]


@dataclass(frozen=True)
class StageGame:
    name: str
    seats: dict[int, str]

    def seat_of(self, party: str) -> int:
        return next(seat for seat, who in self.seats.items() if who == party)


def stage_games(tree: GameTree) -> tuple[StageGame, StageGame]:
    """G1 puts H in seat 1; G2 swaps the roles. Both use ``tree`` unchanged."""
    del tree  # the seat maps do not depend on the game
    return StageGame("G1", {1: H, 2: AI}), StageGame("G2", {1: AI, 2: H})


@dataclass(frozen=True)
class ContestSpec:
    """A contest over ``game``.

    ``ai_seat1`` is the AI's committed strategy when it moves first (G2);
    ``ai_seat2`` when H moves first (G1). With ``h_strategies`` unset H best
    responds in each game; otherwise it is H's (seat-1, seat-2) pair.
    """

    game: GameTree
    ai_seat1: Strategy
    ai_seat2: Strategy
    k: int = 1
    h_strategies: tuple[Strategy, Strategy] | None = None

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"repetition count k must be a positive integer, got {self.k!r}")
        if self.ai_seat1.seat != 1 or self.ai_seat2.seat != 2:
            raise StrategyError("AI strategies must be for seat 1 and seat 2 respectively")
        if self.h_strategies is not None:
            h1, h2 = self.h_strategies
            if h1.seat != 1 or h2.seat != 2:
                raise StrategyError("H strategies must be for seat 1 and seat 2 respectively")

    @property
    def h_mode(self) -> str:
        return "best-response" if self.h_strategies is None else "explicit"


@dataclass(frozen=True)
class GameOutcome:
    """Exact expected payoffs of one stage game, by party."""

    h: Fraction
    ai: Fraction


@dataclass(frozen=True)
class ContestReport:
    k: int
    h_mode: str
    g1: GameOutcome
    g2: GameOutcome
    stage: GameOutcome
    totals: GameOutcome
    h_responses: tuple[Strategy, Strategy]
    verdict: Verdict


def outperformance_verdict(totals: GameOutcome | ContestReport) -> Verdict:
    if isinstance(totals, ContestReport):
        totals = totals.totals
    if totals.h > totals.ai:
        return "h_outperforms"
    if totals.ai > totals.h:
        return "ai_outperforms"
    return "neither"


def play_contest(spec: ContestSpec) -> ContestReport:
    """Evaluate both stage games exactly and scale by ``k``.

    The AI's strategies are fixed before H's are chosen, and H's choice reads
    only the AI's committed strategy for that game.
    """
    tree = spec.game
    check_strategy(tree, spec.ai_seat1)
    check_strategy(tree, spec.ai_seat2)
    if spec.h_strategies is None:
        h1 = best_response(tree, 1, spec.ai_seat2).strategy
        h2 = best_response(tree, 2, spec.ai_seat1).strategy
    else:
        h1, h2 = spec.h_strategies
        check_strategy(tree, h1)
        check_strategy(tree, h2)

    u_g1 = expected_utility(tree, StrategyProfile(h1, spec.ai_seat2))
    u_g2 = expected_utility(tree, StrategyProfile(spec.ai_seat1, h2))
    g1 = GameOutcome(h=u_g1[0], ai=u_g1[1])
    g2 = GameOutcome(h=u_g2[1], ai=u_g2[0])
    stage = GameOutcome(g1.h + g2.h, g1.ai + g2.ai)
    totals = GameOutcome(spec.k * stage.h, spec.k * stage.ai)
    return ContestReport(
        k=spec.k,
        h_mode=spec.h_mode,
        g1=g1,
        g2=g2,
        stage=stage,
        totals=totals,
        h_responses=(h1, h2),
        verdict=outperformance_verdict(totals),
    )
