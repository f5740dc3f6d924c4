from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from contestaudit.strategy import BehavioralStrategy, MixedStrategy, PureStrategy, enumerate_pure_strategies
from contestaudit.tree import GameTree, validate_tree


def random_raw_tree(rng: random.Random, max_decisions: int = 6, max_actions: int = 3) -> dict:
    """Random tree description with 1..max_decisions decision nodes.

    Payoffs are small rationals so ties and non-integer values both show up.
    """
    n_decisions = rng.randint(1, max_decisions)
    nodes: dict = {}
    counter = {"d": 0, "t": 0}

    def new_id(kind):
        counter[kind] += 1
        return f"{kind}{counter[kind]}"

    root = new_id("d")
    frontier = [root]
    decisions = [root]
    while len(decisions) < n_decisions:
        parent = rng.choice(frontier)
        child = new_id("d")
        decisions.append(child)
        frontier.append(child)
        nodes.setdefault(parent, []).append(child)
    raw_nodes = {}
    for d in decisions:
        children = nodes.get(d, [])
        n_actions = max(len(children), rng.randint(1, max_actions))
        while len(children) < n_actions:
            children.append(new_id("t"))
        rng.shuffle(children)
        raw_nodes[d] = {
            "kind": "decision",
            "owner": rng.choice((1, 2)),
            "actions": [{"label": f"a{i}", "child": c} for i, c in enumerate(children)],
        }
        for c in children:
            if c.startswith("t"):
                raw_nodes[c] = {
                    "kind": "terminal",
                    "payoffs": [Fraction(rng.randint(-4, 8), rng.choice((1, 1, 2))) for _ in range(2)],
                }
    return {"players": 2, "root": root, "nodes": raw_nodes}


def random_tree(rng: random.Random, **kw) -> GameTree:
    return validate_tree(random_raw_tree(rng, **kw))


def random_behavioral(rng: random.Random, tree: GameTree, seat: int, denominators=(1, 2, 3, 4)) -> BehavioralStrategy:
    probs = {}
    for node_id in tree.decision_nodes(seat):
        labels = tree[node_id].labels
        den = rng.choice(denominators)
        counts = [0] * len(labels)
        for _ in range(den):
            counts[rng.randrange(len(labels))] += 1
        probs[node_id] = {lab: Fraction(c, den) for lab, c in zip(labels, counts)}
    return BehavioralStrategy(seat, probs)


def random_mixed(rng: random.Random, tree: GameTree, seat: int, max_atoms: int = 4) -> MixedStrategy:
    pures = enumerate_pure_strategies(tree, seat)
    chosen = [rng.choice(pures) for _ in range(rng.randint(1, max_atoms))]
    raw = [rng.randint(1, 5) for _ in chosen]
    total = sum(raw)
    return MixedStrategy(seat, tuple((p, Fraction(w, total)) for p, w in zip(chosen, raw)))


@st.composite
def trees(draw, max_decisions: int = 6, max_actions: int = 3):
    rng = draw(st.randoms(use_true_random=False))
    return random_tree(rng, max_decisions=max_decisions, max_actions=max_actions)


@pytest.fixture
def rng():
    return random.Random(20261018)


def all_stop(tree: GameTree, seat: int) -> PureStrategy:
    return PureStrategy(seat, {n: "S" for n in tree.decision_nodes(seat)})


def all_continue(tree: GameTree, seat: int) -> PureStrategy:
    return PureStrategy(seat, {n: "C" for n in tree.decision_nodes(seat)})
