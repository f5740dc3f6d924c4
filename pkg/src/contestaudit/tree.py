"""Finite two-player perfect-information game trees with exact payoffs."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator, Mapping, Union

SEATS = (1, 2)


class TreeValidationError(ValueError):
    """Raised when a raw tree description does not describe a valid game tree.

    ``kind`` is a stable machine-readable tag for the failure (``cycle``,
    ``orphan``, ``multiple_parents``, ``no_actions``, ``payoff_count``,
    ``duplicate_label``, ``unreachable``, ``unknown_node``, ``malformed``).
    """

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


@dataclass(frozen=True)
class Action:
    label: str
    child: str


@dataclass(frozen=True)
class DecisionNode:
    owner: int
    actions: tuple[Action, ...]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(a.label for a in self.actions)

    def child(self, label: str) -> str:
        for a in self.actions:
            if a.label == label:
                return a.child
        raise KeyError(label)


@dataclass(frozen=True)
class TerminalNode:
    payoffs: tuple[Fraction, Fraction]


Node = Union[DecisionNode, TerminalNode]


@dataclass(frozen=True, eq=False)
class GameTree:
    """A validated game tree.

    Nodes are stored in preorder (root first, children in declared action
    order), which is also the canonical iteration order everywhere else.
    Build instances through :func:`validate_tree`.
    """

    root: str
    nodes: Mapping[str, Node]
    parents: Mapping[str, str | None] = field(repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GameTree):
            return NotImplemented
        return self.root == other.root and list(self.nodes.items()) == list(other.nodes.items())

    def __hash__(self) -> int:
        return hash((self.root, tuple(self.nodes.items())))

    def __iter__(self) -> Iterator[str]:
        return iter(self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def __getitem__(self, node_id: str) -> Node:
        return self.nodes[node_id]

    def is_terminal(self, node_id: str) -> bool:
        return isinstance(self.nodes[node_id], TerminalNode)

    def decision_nodes(self, seat: int | None = None) -> list[str]:
        return [
            nid
            for nid, node in self.nodes.items()
            if isinstance(node, DecisionNode) and (seat is None or node.owner == seat)
        ]

    def terminals(self) -> list[str]:
        return [nid for nid, node in self.nodes.items() if isinstance(node, TerminalNode)]

    def payoffs(self, node_id: str) -> tuple[Fraction, Fraction]:
        node = self.nodes[node_id]
        if not isinstance(node, TerminalNode):
            raise KeyError(f"{node_id} is not a terminal node")
        return node.payoffs

    def path(self, node_id: str) -> list[tuple[str, str]]:
        """(decision node, action label) pairs leading from the root to ``node_id``."""
        steps = []
        current = node_id
        while (parent := self.parents[current]) is not None:
            node = self.nodes[parent]
            assert isinstance(node, DecisionNode)
            label = next(a.label for a in node.actions if a.child == current)
            steps.append((parent, label))
            current = parent
        steps.reverse()
        return steps

    def to_raw(self) -> dict[str, Any]:
        """Plain description accepted back by :func:`validate_tree`."""
        nodes: dict[str, Any] = {}
        for nid, node in self.nodes.items():
            if isinstance(node, DecisionNode):
                nodes[nid] = {
                    "kind": "decision",
                    "owner": node.owner,
                    "actions": [{"label": a.label, "child": a.child} for a in node.actions],
                }
            else:
                nodes[nid] = {"kind": "terminal", "payoffs": list(node.payoffs)}
        return {"players": 2, "root": self.root, "nodes": nodes}


def _rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool):
        raise TreeValidationError("malformed", f"payoff at {where} is not a number: {value!r}")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise TreeValidationError("malformed", f"payoff at {where} is not a rational: {value!r}") from None


def validate_tree(raw: Mapping[str, Any]) -> GameTree:
    """Validate a raw description and return a :class:`GameTree`.

    ``raw`` has the shape of the game file format: ``root`` plus ``nodes``,
    where each node is ``{"kind": "decision", "owner": 1|2, "actions": [...]}``
    or ``{"kind": "terminal", "payoffs": [u1, u2]}``. A node without an explicit
    ``kind`` is inferred from whether it has ``actions`` or ``payoffs``.
    """
    if not isinstance(raw, Mapping):
        raise TreeValidationError("malformed", "tree description must be a mapping")
    if raw.get("players", 2) != 2:
        raise TreeValidationError("malformed", f"expected 2 players, got {raw.get('players')!r}")
    raw_nodes = raw.get("nodes")
    root = raw.get("root")
    if not isinstance(raw_nodes, Mapping) or not raw_nodes:
        raise TreeValidationError("malformed", "tree needs a non-empty 'nodes' mapping")
    if not isinstance(root, str) or root not in raw_nodes:
        raise TreeValidationError("unknown_node", f"root {root!r} is not a declared node")

    parsed: dict[str, Node] = {}
    for nid, spec in raw_nodes.items():
        if not isinstance(nid, str) or not isinstance(spec, Mapping):
            raise TreeValidationError("malformed", f"node {nid!r} must be a mapping keyed by a string id")
        kind = spec.get("kind") or ("terminal" if "payoffs" in spec else "decision")
        if kind == "terminal":
            payoffs = spec.get("payoffs")
            if not isinstance(payoffs, (list, tuple)) or len(payoffs) != 2:
                count = len(payoffs) if isinstance(payoffs, (list, tuple)) else 0
                raise TreeValidationError(
                    "payoff_count", f"terminal {nid} has {count} payoffs, expected 2"
                )
            if spec.get("actions"):
                raise TreeValidationError("malformed", f"terminal {nid} declares actions")
            parsed[nid] = TerminalNode(
                (_rational(payoffs[0], nid), _rational(payoffs[1], nid))
            )
        elif kind == "decision":
            owner = spec.get("owner")
            if owner not in SEATS or isinstance(owner, bool):
                raise TreeValidationError("malformed", f"decision node {nid} has owner {owner!r}")
            actions = spec.get("actions") or []
            if not actions:
                raise TreeValidationError("no_actions", f"decision node {nid} has no actions")
            seen: set[str] = set()
            built = []
            for a in actions:
                if isinstance(a, Mapping):
                    label, child = a.get("label"), a.get("child")
                else:
                    label, child = a
                if not isinstance(label, str) or not isinstance(child, str):
                    raise TreeValidationError("malformed", f"bad action {a!r} at {nid}")
                if label in seen:
                    raise TreeValidationError(
                        "duplicate_label", f"action label {label!r} repeated at {nid}"
                    )
                seen.add(label)
                built.append(Action(label, child))
            parsed[nid] = DecisionNode(owner, tuple(built))
        else:
            raise TreeValidationError("malformed", f"node {nid} has unknown kind {kind!r}")

    parents: dict[str, str | None] = {nid: None for nid in parsed}
    for nid, node in parsed.items():
        if not isinstance(node, DecisionNode):
            continue
        for a in node.actions:
            if a.child not in parsed:
                raise TreeValidationError(
                    "unknown_node", f"action {a.label!r} at {nid} points to undeclared node {a.child!r}"
                )
            if a.child == nid:
                raise TreeValidationError("cycle", f"{nid} is its own child")
            if parents[a.child] is not None:
                raise TreeValidationError(
                    "multiple_parents", f"{a.child} has parents {parents[a.child]} and {nid}"
                )
            parents[a.child] = nid

    # with single parents enforced, any cycle reachable from the root runs through it
    if parents[root] is not None:
        raise TreeValidationError("cycle", f"root {root} has parent {parents[root]}")
    order: list[str] = []
    stack = [root]
    while stack:
        nid = stack.pop()
        order.append(nid)
        node = parsed[nid]
        if isinstance(node, DecisionNode):
            stack.extend(a.child for a in reversed(node.actions))
    visited = set(order)

    for nid in parsed:
        if nid != root and parents[nid] is None:
            raise TreeValidationError("orphan", f"{nid} has no parent")
    missing = [nid for nid in parsed if nid not in visited]
    if missing:
        raise TreeValidationError("unreachable", f"nodes not reachable from root: {missing}")

    return GameTree(
        root=root,
        nodes={nid: parsed[nid] for nid in order},
        parents={nid: parents[nid] for nid in order},
    )


def subgame(tree: GameTree, node_id: str) -> GameTree:
    """Return the subtree rooted at ``node_id`` with payoffs unchanged."""
    if node_id not in tree.nodes:
        raise KeyError(f"unknown node {node_id!r}")
    if tree.is_terminal(node_id):
        raise ValueError(f"{node_id} is terminal; subgames start at decision nodes")
    if node_id == tree.root:
        return tree
    keep: dict[str, Node] = {}
    stack = [node_id]
    while stack:
        nid = stack.pop()
        keep[nid] = tree.nodes[nid]
        node = tree.nodes[nid]
        if isinstance(node, DecisionNode):
            stack.extend(a.child for a in reversed(node.actions))
    return GameTree(
        root=node_id,
        nodes=keep,
        parents={nid: (None if nid == node_id else tree.parents[nid]) for nid in keep},
    )
