"""Exact-arithmetic toolkit for two-player perfect-information games,
role-swapped contests, and the centipede audit."""
from .centipede import below_average_bound, is_long, make_centipede
from .contest import ContestReport, ContestSpec, outperformance_verdict, play_contest, stage_games
from .harness import (
    AuditConfig,
    AuditReport,
    audit_bound_claim,
    audit_mutual_best_response,
    audit_spne_claim,
    replay_records,
    run_audit,
    sweep_outperformance,
)
from .solvers import (
    BudgetExceeded,
    backward_induction,
    best_response,
    enumerate_pure_nash,
    is_nash,
    is_spne,
)
from .strategy import (
    BehavioralStrategy,
    MixedStrategy,
    PureStrategy,
    StrategyError,
    StrategyProfile,
    enumerate_pure_strategies,
    expected_utility,
    mixed_to_behavioral,
    reach_distribution,
)
from .tree import GameTree, TreeValidationError, subgame, validate_tree

__all__ = [
    "AuditConfig", "AuditReport", "BehavioralStrategy", "BudgetExceeded", "ContestReport",
    "ContestSpec", "GameTree", "MixedStrategy", "PureStrategy", "StrategyError",
    "StrategyProfile", "TreeValidationError", "audit_bound_claim", "audit_mutual_best_response",
    "audit_spne_claim", "backward_induction", "below_average_bound", "best_response",
    "enumerate_pure_nash", "enumerate_pure_strategies", "expected_utility", "is_long",
    "is_nash", "is_spne", "make_centipede", "mixed_to_behavioral", "outperformance_verdict",
    "play_contest", "reach_distribution", "replay_records", "run_audit", "stage_games",
    "subgame", "sweep_outperformance", "validate_tree",
]
