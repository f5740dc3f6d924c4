"""Increasing-sum centipede games and the below-average payoff bound."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .tree import GameTree, validate_tree

LONG_THRESHOLD = 10

Verdict = Literal["below", "equal", "above"]


@dataclass(frozen=True)
class CentipedeSpec:
    m: int

    def __post_init__(self):
        check_m(self.m)

    def owner(self, t: int) -> int:
        """Seat that moves at decision node ``t`` (1-based)."""
        return 1 if t % 2 else 2

    def index(self, t: int) -> int:
        """Per-seat index k of node ``t``: seat 1's k-th node is 2k-1, seat 2's is 2k."""
        return (t + 1) // 2

    def stop_payoffs(self, t: int) -> tuple[int, int]:
        k = self.index(t)
        if self.owner(t) == 1:
            return 2 * k, 2 * k - 1
        return 2 * k - 1, 2 * k + 2

    def pass_payoffs(self) -> tuple[int, int]:
        k = self.m // 2
        return 2 * k + 2, 2 * k + 1


def check_m(m: int) -> None:
    if not isinstance(m, int) or isinstance(m, bool):
        raise ValueError(f"m must be an integer, got {m!r}")
    if m < 2:
        raise ValueError(f"m must be at least 2, got {m}")
    if m % 2:
        raise ValueError(f"m must be even, got odd m={m}")


def make_centipede(m: int) -> GameTree:
    """Centipede game with ``m`` decision nodes ``d1..dm``.

    Stopping at ``dt`` ends at terminal ``tt``; continuing at ``dm`` ends at
    ``t{m+1}``. Every node offers ``S`` then ``C``.
    """
    spec = CentipedeSpec(m)
    nodes: dict = {}
    for t in range(1, m + 1):
        nxt = f"d{t + 1}" if t < m else f"t{m + 1}"
        nodes[f"d{t}"] = {
            "kind": "decision",
            "owner": spec.owner(t),
            "actions": [{"label": "S", "child": f"t{t}"}, {"label": "C", "child": nxt}],
        }
        nodes[f"t{t}"] = {"kind": "terminal", "payoffs": list(spec.stop_payoffs(t))}
    nodes[f"t{m + 1}"] = {"kind": "terminal", "payoffs": list(spec.pass_payoffs())}
    return validate_tree({"players": 2, "root": "d1", "nodes": nodes})


def is_long(m: int) -> bool:
    check_m(m)
    return m >= LONG_THRESHOLD


@dataclass(frozen=True)
class BoundResult:
    m: int
    p_stop: Fraction
    bound: Fraction
    benchmark: Fraction
    verdict: Verdict


def stop_bound(m: int, p_stop: Fraction) -> Fraction:
    """Best case for seat 1 stopping at the root w.p. ``p_stop``: 2 there, at most m+2 elsewhere."""
    p = Fraction(p_stop)
    return 2 * p + (m + 2) * (1 - p)


def below_average_bound(m: int, p_stop) -> BoundResult:
    check_m(m)
    p = Fraction(p_stop)
    if not 0 <= p <= 1:
        raise ValueError(f"p_stop must lie in [0, 1], got {p}")
    bound = stop_bound(m, p)
    benchmark = Fraction(m, 2)
    if bound < benchmark:
        verdict: Verdict = "below"
    elif bound == benchmark:
        verdict = "equal"
    else:
        verdict = "above"
    return BoundResult(m, p, bound, benchmark, verdict)
