"""Exact payoff tables over many strategies at once.

The probability of reaching terminal z factors into a seat-1 part and a seat-2
part (each the product of that seat's own action probabilities on the path to
z). Stacking those parts for a batch of strategies gives realization matrices
R1 and R2, and the payoff of seat i for every pair is R1 @ diag(u_i) @ R2.T.
Everything is scaled to integers so the products are exact.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from .strategy import BehavioralStrategy, PureStrategy
from .tree import GameTree

_INT64_SAFE = 2**62


def realization_weights(tree: GameTree, strategy: PureStrategy | BehavioralStrategy) -> list[Fraction]:
    """Own-action probability product on the path to each terminal, in tree order."""
    weights = []
    for z in tree.terminals():
        w = Fraction(1)
        for node_id, label in tree.path(z):
            if tree[node_id].owner == strategy.seat:
                w *= strategy.distribution(node_id).get(label, 0)
                if not w:
                    break
        weights.append(w)
    return weights


def _scaled(rows: list[list[Fraction]]) -> tuple[list[list[int]], int]:
    scale = 1
    for row in rows:
        for w in row:
            scale = lcm(scale, w.denominator)
    return [[int(w * scale) for w in row] for row in rows], scale


class PayoffTable:
    """Exact payoffs of every (seat-1 strategy, seat-2 strategy) pair.

    ``num[i]`` holds integer numerators for seat ``i + 1``; the true payoff is
    ``num[i][a, b] / den``.
    """

    def __init__(
        self,
        tree: GameTree,
        first: Sequence[PureStrategy | BehavioralStrategy],
        second: Sequence[PureStrategy | BehavioralStrategy],
    ):
        r1, s1 = _scaled([realization_weights(tree, s) for s in first])
        r2, s2 = _scaled([realization_weights(tree, s) for s in second])
        pay = [tree.payoffs(z) for z in tree.terminals()]
        u, su = _scaled([[p[0] for p in pay], [p[1] for p in pay]])
        self.den = s1 * s2 * su
        peak = max(map(abs, (x for row in r1 for x in row)), default=0)
        peak *= max(map(abs, (x for row in r2 for x in row)), default=0)
        peak *= max(map(abs, (x for row in u for x in row)), default=0) * len(pay)
        dtype = np.int64 if peak < _INT64_SAFE else object
        R1 = np.array(r1, dtype=dtype).reshape(len(first), len(pay))
        R2 = np.array(r2, dtype=dtype).reshape(len(second), len(pay))
        self.num = [
            (R1 * np.array(u[i], dtype=dtype)) @ R2.T for i in range(2)
        ]

    def value(self, seat: int, a: int, b: int) -> Fraction:
        return Fraction(int(self.num[seat - 1][a, b]), self.den)
