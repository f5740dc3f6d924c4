"""Executable audit of the centipede impossibility argument.

Four steps, each returning a :class:`StepResult` with the exact numbers it
compared:

* ``spne``: backward induction gives all-S with root payoff (2, 1) and no
  ties; every pure Nash equilibrium ends at the root.
* ``bound``: the root-stop payoff bound falls below m/2 once the root stop
  probability passes the threshold.
* ``mutual_br``: on a probability grid, every pair of mutual best responses
  stops at the root.
* ``sweep``: for every committed AI strategy pair on the grid that survives
  the below-average filter, does a best-responding H strictly win the
  contest? Pairs where it does not become counterexample records.
"""
from __future__ import annotations

import heapq
from collections import Counter
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lcm
from typing import Any, Iterator, Literal, Sequence

import numpy as np

from .centipede import below_average_bound, check_m, make_centipede, stop_bound
from .contest import ContestSpec, GameOutcome, play_contest
from .realization import PayoffTable, realization_weights
from .solvers import BudgetExceeded, backward_induction, best_response, pure_nash_table
from .strategy import (
    BehavioralStrategy,
    PureStrategy,
    StrategyProfile,
    expected_utility,
)
from .tree import DecisionNode, GameTree

FilterMode = Literal["root-only", "root+benchmark"]
Status = Literal["pass", "pass_with_note", "fail", "skipped"]
FILTER_MODES: tuple[str, ...] = ("root-only", "root+benchmark")

DEFAULT_BUDGET = 2**24
DEFAULT_MAX_LISTED = 1000
ROOT_STOP_THRESHOLD = Fraction(3, 4)
BOUND_GRID = Fraction(1, 16)


@dataclass(frozen=True)
class AuditConfig:
    m: int = 10
    grid: Fraction = Fraction(1, 4)
    c_min: Fraction = Fraction(1, 4)
    filter: FilterMode = "root-only"
    budget: int = DEFAULT_BUDGET
    max_listed: int | None = DEFAULT_MAX_LISTED

    def __post_init__(self):
        check_m(self.m)
        object.__setattr__(self, "grid", Fraction(self.grid))
        object.__setattr__(self, "c_min", Fraction(self.c_min))
        check_grid(self.grid)
        if not 0 <= self.c_min <= 1:
            raise ValueError(f"c_min must lie in [0, 1], got {self.c_min}")
        if self.filter not in FILTER_MODES:
            raise ValueError(f"filter must be one of {FILTER_MODES}, got {self.filter!r}")
        if self.budget < 1:
            raise ValueError("budget must be positive")
        if self.max_listed is not None and self.max_listed < 0:
            raise ValueError("max_listed must be non-negative")


def check_grid(step: Fraction) -> None:
    if not 0 < step <= 1 or (1 / step).denominator != 1:
        raise ValueError(f"grid step must be 1/n for a positive integer n, got {step}")


@dataclass(frozen=True)
class StepResult:
    name: str
    status: Status
    values: dict[str, Any] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "pass_with_note")


# ---------------------------------------------------------------- grids


def grid_distributions(labels: Sequence[str], step: Fraction) -> list[dict[str, Fraction]]:
    """Distributions over ``labels`` with every probability a multiple of ``step``.

    Ordered by the first label's probability ascending, then the next, and so on.
    """
    n = int(1 / step)
    out = []
    for counts in itertools.product(range(n + 1), repeat=len(labels) - 1):
        rest = n - sum(counts)
        if rest < 0:
            continue
        out.append({lab: c * step for lab, c in zip(labels, (*counts, rest))})
    return out


def grid_strategy_count(tree: GameTree, seat: int, step: Fraction) -> int:
    n = int(1 / step)
    total = 1
    for node_id in tree.decision_nodes(seat):
        k = len(tree[node_id].actions)
        # compositions of n into k parts
        total *= comb(n + k - 1, k - 1)
    return total


def grid_strategies(tree: GameTree, seat: int, step: Fraction) -> list[BehavioralStrategy]:
    """Every behavioral strategy of ``seat`` on the lattice, in grid-index order."""
    owned = tree.decision_nodes(seat)
    per_node = [grid_distributions(tree[n].labels, step) for n in owned]
    return [BehavioralStrategy(seat, dict(zip(owned, combo))) for combo in itertools.product(*per_node)]


def root_stop_terminal(tree: GameTree) -> str:
    node = tree[tree.root]
    assert isinstance(node, DecisionNode)
    child = node.actions[0].child
    if not tree.is_terminal(child):
        raise ValueError("the root's first action does not end the game")
    return child


def _all_first(tree: GameTree, seat: int) -> PureStrategy:
    return PureStrategy(seat, {n: tree[n].labels[0] for n in tree.decision_nodes(seat)})


# ---------------------------------------------------------------- step A


def audit_spne_claim(m: int, budget: int = DEFAULT_BUDGET) -> StepResult:
    tree = make_centipede(m)
    solved = backward_induction(tree)
    all_stop = StrategyProfile(_all_first(tree, 1), _all_first(tree, 2))
    root_payoff = tree.payoffs(root_stop_terminal(tree))
    values: dict[str, Any] = {
        "m": m,
        "all_stop": solved.profile == all_stop,
        "root_payoff": list(solved.payoffs),
        "expected_root_payoff": list(root_payoff),
        "unique": solved.unique,
    }
    ok = solved.profile == all_stop and solved.payoffs == root_payoff and solved.unique
    notes = []
    try:
        _, _, table, stable = pure_nash_table(tree, budget)
    except BudgetExceeded as exc:
        notes.append(f"pure Nash enumeration skipped: {exc}")
        values["pure_nash_checked"] = False
    else:
        u1, u2 = table.num
        values["pure_profiles"] = int(stable.size)
        outcomes = Counter(
            (Fraction(int(a), table.den), Fraction(int(b), table.den))
            for a, b in zip(u1[stable], u2[stable])
        )
        values["pure_nash_checked"] = True
        values["pure_nash_count"] = sum(outcomes.values())
        values["pure_nash_outcomes"] = [[list(k), v] for k, v in sorted(outcomes.items())]
        ok = ok and set(outcomes) == {root_payoff}
    return StepResult("spne", "pass" if ok else "fail", values, tuple(notes))


# ---------------------------------------------------------------- step B


def audit_bound_claim(
    m: int,
    p: Fraction = ROOT_STOP_THRESHOLD,
    threshold: Fraction = ROOT_STOP_THRESHOLD,
    grid: Fraction = BOUND_GRID,
) -> StepResult:
    """Check the root-stop bound: decreasing past ``threshold`` and below m/2 for m >= 10."""
    check_m(m)
    p, threshold, grid = Fraction(p), Fraction(threshold), Fraction(grid)
    check_grid(grid)
    at_p = below_average_bound(m, p)
    at_threshold = below_average_bound(m, threshold)
    points = [j * grid for j in range(int(1 / grid) + 1) if j * grid > threshold]
    above_threshold = [(q, stop_bound(m, q)) for q in points]
    decreasing = all(b < at_threshold.bound for _, b in above_threshold)
    values: dict[str, Any] = {
        "m": m,
        "p": p,
        "bound_at_p": at_p.bound,
        "verdict_at_p": at_p.verdict,
        "threshold": threshold,
        "bound_at_threshold": at_threshold.bound,
        "benchmark": at_threshold.benchmark,
        "verdict_at_threshold": at_threshold.verdict,
        "grid_points": [[q, b] for q, b in above_threshold],
        "decreasing_past_threshold": decreasing,
    }
    notes: list[str] = []
    if not decreasing:
        status: Status = "fail"
    elif m >= 10:
        status = "pass" if at_threshold.verdict == "below" else "fail"
    elif m == 8:
        if at_threshold.verdict == "equal":
            status = "pass_with_note"
            notes.append(
                f"boundary equality at m=8: bound({threshold}) = {at_threshold.bound} = m/2;"
                f" strictly below only for stop probabilities above {threshold}"
            )
        else:
            status = "pass" if at_threshold.verdict == "below" else "fail"
    else:
        status = "skipped"
        notes.append(
            f"bound claim covers m >= 8 only; here bound({threshold}) = {at_threshold.bound}"
            f" vs m/2 = {at_threshold.benchmark} ({at_threshold.verdict})"
        )
    return StepResult("bound", status, values, tuple(notes))


# ---------------------------------------------------------------- step C


def audit_mutual_best_response(
    m: int, grid: Fraction = Fraction(1, 4), budget: int = DEFAULT_BUDGET
) -> StepResult:
    """Find every grid profile whose strategies best-respond to each other."""
    grid = Fraction(grid)
    check_grid(grid)
    tree = make_centipede(m)
    n1, n2 = grid_strategy_count(tree, 1, grid), grid_strategy_count(tree, 2, grid)
    if n1 * n2 > budget:
        raise BudgetExceeded(f"{n1 * n2} grid profiles exceed budget {budget}")
    first = grid_strategies(tree, 1, grid)
    second = grid_strategies(tree, 2, grid)
    table = PayoffTable(tree, first, second)
    u1, u2 = table.num

    def scaled(values: list[Fraction], dtype) -> tuple[np.ndarray, np.ndarray]:
        scaled_vals = [v * table.den for v in values]
        exact = np.array([v.denominator == 1 for v in scaled_vals])
        ints = np.array([int(v) if v.denominator == 1 else 0 for v in scaled_vals], dtype=dtype)
        return ints, exact

    br1 = [best_response(tree, 1, s).value for s in second]
    br2 = [best_response(tree, 2, s).value for s in first]
    t1, e1 = scaled(br1, u1.dtype)
    t2, e2 = scaled(br2, u2.dtype)
    # pure strategies lie on the grid, so the table's own maxima must match the DP values
    oracle_agrees = bool(
        e1.all() and e2.all()
        and np.array_equal(u1.max(axis=0), t1)
        and np.array_equal(u2.max(axis=1), t2)
    )
    mutual = (u1 == t1[None, :]) & e1[None, :] & (u2 == t2[:, None]) & e2[:, None]

    stop = tree.terminals().index(root_stop_terminal(tree))
    stop1 = np.array([realization_weights(tree, s)[stop] == 1 for s in first])
    # seat 2 never moves before the root stop, so seat 1's weight alone decides it
    off_root = mutual & ~stop1[:, None]
    rows, cols = np.nonzero(mutual)
    all_stop_idx = (first.index(BehavioralStrategy.from_pure(_all_first(tree, 1))),
                    second.index(BehavioralStrategy.from_pure(_all_first(tree, 2))))
    witnesses = [
        {"seat1": first[a].probs, "seat2": second[b].probs}
        for a, b in itertools.islice(zip(*np.nonzero(off_root)), 5)
    ]
    values: dict[str, Any] = {
        "m": m,
        "grid": grid,
        "profiles_checked": n1 * n2,
        "mutual_best_responses": int(len(rows)),
        "not_root_stop": int(off_root.sum()),
        "all_stop_qualifies": bool(mutual[all_stop_idx]),
        "br_oracle_agrees": oracle_agrees,
        "witnesses": witnesses,
    }
    ok = not off_root.any() and values["all_stop_qualifies"] and oracle_agrees
    return StepResult("mutual_br", "pass" if ok else "fail", values)


# ---------------------------------------------------------------- step D


@dataclass(frozen=True)
class RoleEntry:
    """One committed AI role strategy, H's best response to it, and the payoffs."""

    index: int
    ai: BehavioralStrategy
    h: PureStrategy
    outcome: GameOutcome

    @property
    def margin(self) -> Fraction:
        return self.outcome.h - self.outcome.ai


@dataclass(frozen=True)
class CounterexampleRecord:
    ai_seat1: BehavioralStrategy
    ai_seat2: BehavioralStrategy
    h_seat1: PureStrategy
    h_seat2: PureStrategy
    g1: GameOutcome
    g2: GameOutcome
    totals: GameOutcome
    margin: Fraction
    benchmark: Fraction
    ai_vs_benchmark: dict[str, str]


@dataclass(frozen=True)
class SweepResult:
    """Sweep step plus the data every record is derived from.

    ``g1_entries`` hold AI-as-seat-2 strategies (H moves first), ``g2_entries``
    AI-as-seat-1 strategies. Every surviving pair (one of each) is a record
    exactly when the two margins sum to at most zero, so the tables encode the
    full record set; ``records`` lists the worst of them, most negative margin
    first.
    """

    step: StepResult
    m: int
    g1_entries: tuple[RoleEntry, ...]
    g2_entries: tuple[RoleEntry, ...]
    record_count: int
    records: tuple[CounterexampleRecord, ...]

    def record_pairs(self) -> Iterator[tuple[int, int]]:
        """Positions (into ``g2_entries``, ``g1_entries``) of every record, row by row."""
        for i, e2 in enumerate(self.g2_entries):
            for j, e1 in enumerate(self.g1_entries):
                if e1.margin + e2.margin <= 0:
                    yield i, j

    def record(self, i: int, j: int) -> CounterexampleRecord:
        return make_record(self.m, self.g2_entries[i], self.g1_entries[j])


def make_record(m: int, seat1: RoleEntry, seat2: RoleEntry) -> CounterexampleRecord:
    g1, g2 = seat2.outcome, seat1.outcome
    totals = GameOutcome(g1.h + g2.h, g1.ai + g2.ai)
    return CounterexampleRecord(
        ai_seat1=seat1.ai,
        ai_seat2=seat2.ai,
        h_seat1=seat2.h,
        h_seat2=seat1.h,
        g1=g1,
        g2=g2,
        totals=totals,
        margin=totals.h - totals.ai,
        benchmark=Fraction(m, 2),
        ai_vs_benchmark={"g1": _versus(g1.ai, m), "g2": _versus(g2.ai, m)},
    )


def _versus(value: Fraction, m: int) -> str:
    benchmark = Fraction(m, 2)
    if value < benchmark:
        return "below"
    return "equal" if value == benchmark else "above"


def _role_entries(tree: GameTree, ai_seat: int, strategies: list[tuple[int, BehavioralStrategy]]) -> list[RoleEntry]:
    h_seat = 3 - ai_seat
    entries = []
    for idx, ai in strategies:
        h = best_response(tree, h_seat, ai).strategy
        profile = StrategyProfile(h, ai) if h_seat == 1 else StrategyProfile(ai, h)
        u = expected_utility(tree, profile)
        entries.append(RoleEntry(idx, ai, h, GameOutcome(h=u[h_seat - 1], ai=u[ai_seat - 1])))
    return entries


def _margin_ints(entries: Sequence[RoleEntry], scale: int) -> np.ndarray:
    return np.array([int(e.margin * scale) for e in entries], dtype=object)


def sweep_outperformance(config: AuditConfig) -> SweepResult:
    tree = make_centipede(config.m)
    n1 = grid_strategy_count(tree, 1, config.grid)
    n2 = grid_strategy_count(tree, 2, config.grid)
    if n1 * n2 > config.budget:
        raise BudgetExceeded(f"{n1 * n2} AI strategy pairs exceed budget {config.budget}")
    root = tree.root
    cont = tree[root].labels[1]
    seat1 = [(i, s) for i, s in enumerate(grid_strategies(tree, 1, config.grid)) if s.prob(root, cont) >= config.c_min]
    seat2 = list(enumerate(grid_strategies(tree, 2, config.grid)))

    g2 = _role_entries(tree, 1, seat1)
    g1 = _role_entries(tree, 2, seat2)
    benchmark = Fraction(config.m, 2)
    if config.filter == "root+benchmark":
        g2 = [e for e in g2 if e.outcome.ai >= benchmark]
        g1 = [e for e in g1 if e.outcome.ai >= benchmark]

    scale = 1
    for e in itertools.chain(g1, g2):
        scale = lcm(scale, e.margin.denominator)
    a = np.sort(_margin_ints(g1, scale).astype(np.int64))
    b = _margin_ints(g2, scale).astype(np.int64)
    # records: pairs with a[j] + b[i] <= 0, i.e. a[j] <= -b[i]
    record_count = int(np.searchsorted(a, -b, side="right").sum()) if len(a) else 0

    listed = _worst_pairs(g2, g1, scale, config.max_listed)
    records = tuple(make_record(config.m, g2[i], g1[j]) for i, j in listed)

    values: dict[str, Any] = {
        "m": config.m,
        "grid": config.grid,
        "filter": config.filter,
        "c_min": config.c_min,
        "ai_seat1_candidates": n1,
        "ai_seat1_surviving": len(g2),
        "ai_seat2_candidates": n2,
        "ai_seat2_surviving": len(g1),
        "pairs_evaluated": len(g1) * len(g2),
        "record_count": record_count,
        "records_listed": len(records),
        "min_margin": (min(e.margin for e in g1) + min(e.margin for e in g2)) if g1 and g2 else None,
    }
    notes = [f"root-continue floor applied inclusively: P({cont} at {root}) >= {config.c_min}"]
    status: Status = "pass" if record_count == 0 else "fail"
    step = StepResult("sweep", status, values, tuple(notes))
    return SweepResult(step, config.m, tuple(g1), tuple(g2), record_count, records)


def _worst_pairs(
    seat1: Sequence[RoleEntry], seat2: Sequence[RoleEntry], scale: int, limit: int | None
) -> list[tuple[int, int]]:
    """Record positions ordered by (margin, seat-1 grid index, seat-2 grid index), up to ``limit``."""
    if not seat1 or not seat2 or limit == 0:
        return []
    col = sorted(range(len(seat2)), key=lambda j: (seat2[j].margin, seat2[j].index))
    col_m = [int(seat2[j].margin * scale) for j in col]
    heap = [(int(e.margin * scale) + col_m[0], e.index, seat2[col[0]].index, i, 0) for i, e in enumerate(seat1)]
    heapq.heapify(heap)
    out = []
    while heap and (limit is None or len(out) < limit):
        total, _, _, i, pos = heapq.heappop(heap)
        if total > 0:
            break
        out.append((i, col[pos]))
        if pos + 1 < len(col):
            nxt = int(seat1[i].margin * scale) + col_m[pos + 1]
            heapq.heappush(heap, (nxt, seat1[i].index, seat2[col[pos + 1]].index, i, pos + 1))
    return out


@dataclass(frozen=True)
class ReplayCheck:
    contests_replayed: int
    entries_checked: int
    records_recounted: int
    listed_checked: int
    mismatches: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def replay_records(result: SweepResult) -> ReplayCheck:
    """Re-derive every record from fresh contest replays.

    A contest's H-first game depends only on the AI's seat-2 strategy and the
    AI-first game only on its seat-1 strategy, so replaying contests that
    together cover every table entry re-derives the payoffs of every record.
    The record set is then recounted pair by pair from the replayed values,
    and each listed record is replayed on its own.
    """
    tree = make_centipede(result.m)
    mismatches: list[str] = []
    g1, g2 = result.g1_entries, result.g2_entries
    replayed1: list[GameOutcome] = [None] * len(g1)  # type: ignore[list-item]
    replayed2: list[GameOutcome] = [None] * len(g2)  # type: ignore[list-item]
    n = max(len(g1), len(g2)) if g1 and g2 else 0
    for r in range(n):
        e1, e2 = g1[r % len(g1)], g2[r % len(g2)]
        rep = play_contest(ContestSpec(tree, ai_seat1=e2.ai, ai_seat2=e1.ai))
        replayed1[r % len(g1)] = rep.g1
        replayed2[r % len(g2)] = rep.g2
        if rep.g1 != e1.outcome or rep.h_responses[0] != e1.h:
            mismatches.append(f"G1 entry {e1.index}: stored {e1.outcome}, replayed {rep.g1}")
        if rep.g2 != e2.outcome or rep.h_responses[1] != e2.h:
            mismatches.append(f"G2 entry {e2.index}: stored {e2.outcome}, replayed {rep.g2}")

    recount = 0
    if n:
        m1 = [o.h - o.ai for o in replayed1]
        m2 = [o.h - o.ai for o in replayed2]
        scale = 1
        for v in itertools.chain(m1, m2):
            scale = lcm(scale, v.denominator)
        a = np.array([int(v * scale) for v in m1], dtype=np.int64)
        for v in m2:
            recount += int(np.count_nonzero(a + int(v * scale) <= 0))
    if recount != result.record_count:
        mismatches.append(f"record count: stored {result.record_count}, recounted {recount}")

    for rec in result.records:
        rep = play_contest(ContestSpec(tree, ai_seat1=rec.ai_seat1, ai_seat2=rec.ai_seat2))
        if (rep.g1, rep.g2, rep.stage) != (rec.g1, rec.g2, rec.totals) or rep.h_responses != (rec.h_seat1, rec.h_seat2):
            mismatches.append(f"listed record with margin {rec.margin} does not replay")
        elif rep.stage.h - rep.stage.ai != rec.margin or rec.margin > 0:
            mismatches.append(f"listed record margin {rec.margin} inconsistent")
    return ReplayCheck(n, len(g1) + len(g2), recount, len(result.records), tuple(mismatches))


# ---------------------------------------------------------------- full audit


@dataclass(frozen=True)
class AuditReport:
    config: AuditConfig
    steps: tuple[StepResult, ...]
    sweep: SweepResult | None
    digest: str = ""

    @property
    def counterexamples(self) -> int:
        return self.sweep.record_count if self.sweep is not None else 0

    @property
    def budget_skipped(self) -> bool:
        return any(s.status == "skipped" and s.values.get("budget_exceeded") for s in self.steps)

    def step(self, name: str) -> StepResult:
        return next(s for s in self.steps if s.name == name)


def run_audit(config: AuditConfig) -> AuditReport:
    steps = [
        audit_spne_claim(config.m, config.budget),
        audit_bound_claim(config.m, 1 - config.c_min, threshold=1 - config.c_min),
    ]
    try:
        steps.append(audit_mutual_best_response(config.m, config.grid, config.budget))
    except BudgetExceeded as exc:
        steps.append(StepResult("mutual_br", "skipped", {"budget_exceeded": True}, (str(exc),)))
    sweep = None
    try:
        sweep = sweep_outperformance(config)
        steps.append(sweep.step)
    except BudgetExceeded as exc:
        steps.append(StepResult("sweep", "skipped", {"budget_exceeded": True}, (str(exc),)))
    report = AuditReport(config, tuple(steps), sweep)

    from .serialize import report_digest

    return AuditReport(config, tuple(steps), sweep, report_digest(report))
