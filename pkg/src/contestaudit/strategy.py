"""Pure, behavioral and mixed strategies, and exact evaluation of profiles."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Mapping, Union

from .tree import SEATS, DecisionNode, GameTree


class StrategyError(ValueError):
    """A strategy is malformed or does not fit the tree it is used with."""


def _check_seat(seat: int) -> None:
    if seat not in SEATS or isinstance(seat, bool):
        raise StrategyError(f"seat must be 1 or 2, got {seat!r}")


@dataclass(frozen=True)
class PureStrategy:
    seat: int
    choices: Mapping[str, str]

    def __post_init__(self):
        _check_seat(self.seat)
        object.__setattr__(self, "choices", dict(self.choices))

    def __hash__(self) -> int:
        return hash((self.seat, tuple(sorted(self.choices.items()))))

    def distribution(self, node_id: str) -> dict[str, Fraction]:
        return {self.choices[node_id]: Fraction(1)}


@dataclass(frozen=True)
class BehavioralStrategy:
    """Independent action distribution at each node the seat owns.

    Zero-probability entries are dropped on construction so that equal
    strategies compare (and serialize) equal.
    """

    seat: int
    probs: Mapping[str, Mapping[str, Fraction]]

    def __post_init__(self):
        _check_seat(self.seat)
        cleaned: dict[str, dict[str, Fraction]] = {}
        for node_id, dist in self.probs.items():
            entries = {label: Fraction(p) for label, p in dist.items()}
            if any(p < 0 for p in entries.values()):
                raise StrategyError(f"negative probability at {node_id}: {entries}")
            if sum(entries.values()) != 1:
                raise StrategyError(f"probabilities at {node_id} sum to {sum(entries.values())}, not 1")
            cleaned[node_id] = {label: p for label, p in entries.items() if p}
        object.__setattr__(self, "probs", cleaned)

    def __hash__(self) -> int:
        return hash((self.seat, tuple(sorted((n, tuple(sorted(d.items()))) for n, d in self.probs.items()))))

    def distribution(self, node_id: str) -> dict[str, Fraction]:
        return self.probs[node_id]

    def prob(self, node_id: str, label: str) -> Fraction:
        return self.probs[node_id].get(label, Fraction(0))

    @classmethod
    def from_pure(cls, pure: PureStrategy) -> BehavioralStrategy:
        return cls(pure.seat, {n: {a: Fraction(1)} for n, a in pure.choices.items()})


@dataclass(frozen=True)
class MixedStrategy:
    seat: int
    atoms: tuple[tuple[PureStrategy, Fraction], ...]

    def __post_init__(self):
        _check_seat(self.seat)
        atoms = tuple((pure, Fraction(w)) for pure, w in self.atoms)
        if not atoms:
            raise StrategyError("mixed strategy needs at least one atom")
        if any(pure.seat != self.seat for pure, _ in atoms):
            raise StrategyError("all pure strategies in a mixture must belong to its seat")
        if any(w < 0 for _, w in atoms):
            raise StrategyError("mixture weights must be non-negative")
        if sum(w for _, w in atoms) != 1:
            raise StrategyError(f"mixture weights sum to {sum(w for _, w in atoms)}, not 1")
        object.__setattr__(self, "atoms", atoms)


Strategy = Union[PureStrategy, BehavioralStrategy, MixedStrategy]


@dataclass(frozen=True)
class StrategyProfile:
    first: Strategy
    second: Strategy

    def __post_init__(self):
        if self.first.seat != 1 or self.second.seat != 2:
            raise StrategyError(
                f"profile seats out of position: got {self.first.seat} and {self.second.seat}"
            )

    def __getitem__(self, seat: int) -> Strategy:
        if seat == 1:
            return self.first
        if seat == 2:
            return self.second
        raise StrategyError(f"seat must be 1 or 2, got {seat!r}")

    def replace(self, strategy: Strategy) -> StrategyProfile:
        if strategy.seat == 1:
            return StrategyProfile(strategy, self.second)
        return StrategyProfile(self.first, strategy)


def check_strategy(tree: GameTree, strategy: Strategy) -> None:
    """Raise :class:`StrategyError` unless ``strategy`` is defined exactly on its seat's nodes."""
    if isinstance(strategy, MixedStrategy):
        for pure, _ in strategy.atoms:
            check_strategy(tree, pure)
        return
    owned = tree.decision_nodes(strategy.seat)
    domain = strategy.choices if isinstance(strategy, PureStrategy) else strategy.probs
    if set(domain) != set(owned):
        extra = sorted(set(domain) - set(owned))
        missing = sorted(set(owned) - set(domain))
        raise StrategyError(
            f"seat {strategy.seat} strategy domain mismatch (missing {missing}, extra {extra})"
        )
    for node_id in owned:
        labels = tree[node_id].labels
        chosen = [strategy.choices[node_id]] if isinstance(strategy, PureStrategy) else strategy.probs[node_id]
        bad = [label for label in chosen if label not in labels]
        if bad:
            raise StrategyError(f"unknown action(s) {bad} at {node_id}; available {list(labels)}")


def restrict(strategy: Strategy, tree: GameTree) -> Strategy:
    """Restrict a strategy to the nodes of ``tree`` (typically a subgame)."""
    if isinstance(strategy, PureStrategy):
        return PureStrategy(strategy.seat, {n: a for n, a in strategy.choices.items() if n in tree.nodes})
    if isinstance(strategy, BehavioralStrategy):
        return BehavioralStrategy(strategy.seat, {n: d for n, d in strategy.probs.items() if n in tree.nodes})
    raise StrategyError("restrict mixed strategies after converting them with mixed_to_behavioral")


def enumerate_pure_strategies(tree: GameTree, seat: int) -> list[PureStrategy]:
    """All pure strategies of ``seat``, in lexicographic order over preorder nodes and action order."""
    _check_seat(seat)
    owned = tree.decision_nodes(seat)
    return [
        PureStrategy(seat, dict(zip(owned, combo)))
        for combo in product(*(tree[n].labels for n in owned))
    ]


def _reach_local(tree: GameTree, first: Strategy, second: Strategy) -> dict[str, Fraction]:
    by_seat = {1: first, 2: second}
    reach: dict[str, Fraction] = {}
    stack = [(tree.root, Fraction(1))]
    while stack:
        node_id, p = stack.pop()
        node = tree[node_id]
        if not isinstance(node, DecisionNode):
            reach[node_id] = reach.get(node_id, Fraction(0)) + p
            continue
        dist = by_seat[node.owner].distribution(node_id)
        for a in reversed(node.actions):
            q = dist.get(a.label)
            if q:
                stack.append((a.child, p * q))
    return reach


def reach_distribution(tree: GameTree, profile: StrategyProfile) -> dict[str, Fraction]:
    """Probability of reaching each terminal under ``profile``.

    Every terminal appears in the result (unreached ones with 0), in tree order.
    Mixed strategies are evaluated by weighting their pure atoms.
    """
    for seat in SEATS:
        check_strategy(tree, profile[seat])
    total = {z: Fraction(0) for z in tree.terminals()}

    def atoms(strategy: Strategy):
        if isinstance(strategy, MixedStrategy):
            return strategy.atoms
        return ((strategy, Fraction(1)),)

    for s1, w1 in atoms(profile.first):
        for s2, w2 in atoms(profile.second):
            if not w1 or not w2:
                continue
            for z, p in _reach_local(tree, s1, s2).items():
                total[z] += w1 * w2 * p
    return total


def expected_utility(tree: GameTree, profile: StrategyProfile) -> tuple[Fraction, Fraction]:
    u1 = u2 = Fraction(0)
    for z, p in reach_distribution(tree, profile).items():
        if p:
            a, b = tree.payoffs(z)
            u1 += p * a
            u2 += p * b
    return u1, u2


def mixed_to_behavioral(tree: GameTree, mixed: MixedStrategy) -> BehavioralStrategy:
    """Realization-equivalent behavioral strategy for a mixed strategy.

    At each owned node the action probabilities are the conditional weights of
    the atoms that do not themselves rule out reaching the node. Nodes no atom
    can reach get the first action deterministically.
    """
    if sum(w for _, w in mixed.atoms) != 1:
        raise StrategyError("mixture weights do not sum to 1")
    check_strategy(tree, mixed)
    probs: dict[str, dict[str, Fraction]] = {}
    for node_id in tree.decision_nodes(mixed.seat):
        own_path = [(n, a) for n, a in tree.path(node_id) if tree[n].owner == mixed.seat]
        consistent = [
            (pure, w) for pure, w in mixed.atoms
            if w and all(pure.choices[n] == a for n, a in own_path)
        ]
        reach_weight = sum((w for _, w in consistent), Fraction(0))
        labels = tree[node_id].labels
        if not reach_weight:
            probs[node_id] = {labels[0]: Fraction(1)}
            continue
        dist = {label: Fraction(0) for label in labels}
        for pure, w in consistent:
            dist[pure.choices[node_id]] += w
        probs[node_id] = {label: w / reach_weight for label, w in dist.items() if w}
    return BehavioralStrategy(mixed.seat, probs)


def as_behavioral(tree: GameTree, strategy: Strategy) -> BehavioralStrategy:
    if isinstance(strategy, BehavioralStrategy):
        return strategy
    if isinstance(strategy, PureStrategy):
        return BehavioralStrategy.from_pure(strategy)
    return mixed_to_behavioral(tree, strategy)
