"""Canonical JSON documents for trees, strategies and reports.

Rationals are strings in lowest terms (``"9/2"``, ``"-3"``); object keys are
sorted, so serializing a value twice gives identical bytes.
"""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import replace
from fractions import Fraction
from math import gcd
from typing import Any, Mapping

from .contest import ContestReport, GameOutcome
from .harness import (
    AuditConfig,
    AuditReport,
    CounterexampleRecord,
    RoleEntry,
    StepResult,
    SweepResult,
)
from .solvers import BestResponseResult, NashVerdict, SolveResult, SpneVerdict
from .strategy import BehavioralStrategy, MixedStrategy, PureStrategy, Strategy, StrategyProfile
from .tree import GameTree, validate_tree


class DocumentError(ValueError):
    """A document is malformed or not in canonical form."""


_RATIONAL = re.compile(r"^(-?)(0|[1-9][0-9]*)(?:/([1-9][0-9]*))?$")


def encode_rational(value: Fraction | int) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def is_rational_text(text: str) -> bool:
    return bool(_RATIONAL.match(text))


def decode_rational(text: Any) -> Fraction:
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise DocumentError(f"expected a rational string like \"9/2\", got {text!r}")
    match = _RATIONAL.match(text)
    if not match:
        raise DocumentError(f"malformed rational {text!r}: expected \"n\" or \"n/d\"")
    sign, num, den = match.groups()
    if sign and num == "0":
        raise DocumentError(f"non-canonical rational {text!r}: write \"0\"")
    if den is None:
        return Fraction(int(sign + num))
    n, d = int(num), int(den)
    value = Fraction(int(sign + num), d)
    if d == 1 or n == 0 or gcd(n, d) != 1:
        raise DocumentError(
            f"non-canonical rational {text!r}: lowest terms is {encode_rational(value)!r}"
        )
    return value


def _field(doc: Mapping[str, Any], key: str, where: str) -> Any:
    if not isinstance(doc, Mapping):
        raise DocumentError(f"{where}: expected an object, got {type(doc).__name__}")
    if key not in doc:
        raise DocumentError(f"{where}: missing field {key!r}")
    return doc[key]


# ---------------------------------------------------------------- generic values


def _encode_any(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, Fraction):
        return encode_rational(value)
    if isinstance(value, int):
        return value
    if isinstance(value, Mapping):
        return {str(k): _encode_any(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode_any(v) for v in value]
    raise TypeError(f"cannot encode {type(value).__name__}")


def _decode_any(value: Any) -> Any:
    if isinstance(value, str):
        return decode_rational(value) if is_rational_text(value) else value
    if isinstance(value, Mapping):
        return {k: _decode_any(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_decode_any(v) for v in value]
    return value


# ---------------------------------------------------------------- trees and strategies


def tree_doc(tree: GameTree) -> dict[str, Any]:
    raw = tree.to_raw()
    for node in raw["nodes"].values():
        if node["kind"] == "terminal":
            node["payoffs"] = [encode_rational(p) for p in node["payoffs"]]
    return raw


def tree_from_doc(doc: Mapping[str, Any]) -> GameTree:
    nodes = _field(doc, "nodes", "game")
    if not isinstance(nodes, Mapping):
        raise DocumentError("game: 'nodes' must be an object")
    converted = {}
    for nid, node in nodes.items():
        if isinstance(node, Mapping) and "payoffs" in node and isinstance(node["payoffs"], list):
            node = {**node, "payoffs": [decode_rational(p) for p in node["payoffs"]]}
        converted[nid] = node
    return validate_tree({**doc, "nodes": converted})


def strategy_doc(strategy: Strategy) -> dict[str, Any]:
    if isinstance(strategy, PureStrategy):
        return {"seat": strategy.seat, "kind": "pure", "choices": dict(strategy.choices)}
    if isinstance(strategy, BehavioralStrategy):
        return {
            "seat": strategy.seat,
            "kind": "behavioral",
            "probs": {n: {a: encode_rational(p) for a, p in d.items()} for n, d in strategy.probs.items()},
        }
    return {
        "seat": strategy.seat,
        "kind": "mixed",
        "atoms": [{"strategy": strategy_doc(p), "weight": encode_rational(w)} for p, w in strategy.atoms],
    }


def strategy_from_doc(doc: Mapping[str, Any]) -> Strategy:
    seat = _field(doc, "seat", "strategy")
    kind = _field(doc, "kind", "strategy")
    try:
        if kind == "pure":
            choices = _field(doc, "choices", "pure strategy")
            if not isinstance(choices, Mapping) or not all(isinstance(v, str) for v in choices.values()):
                raise DocumentError("pure strategy: 'choices' must map node ids to action labels")
            return PureStrategy(seat, dict(choices))
        if kind == "behavioral":
            probs = _field(doc, "probs", "behavioral strategy")
            if not isinstance(probs, Mapping) or not all(isinstance(d, Mapping) for d in probs.values()):
                raise DocumentError("behavioral strategy: 'probs' must map node ids to {label: rational}")
            return BehavioralStrategy(
                seat, {n: {a: decode_rational(p) for a, p in d.items()} for n, d in probs.items()}
            )
        if kind == "mixed":
            atoms = _field(doc, "atoms", "mixed strategy")
            if not isinstance(atoms, list):
                raise DocumentError("mixed strategy: 'atoms' must be a list")
            parsed = []
            for atom in atoms:
                pure = strategy_from_doc(_field(atom, "strategy", "mixed atom"))
                if not isinstance(pure, PureStrategy):
                    raise DocumentError("mixed strategy atoms must be pure strategies")
                parsed.append((pure, decode_rational(_field(atom, "weight", "mixed atom"))))
            return MixedStrategy(seat, tuple(parsed))
    except DocumentError:
        raise
    except ValueError as exc:
        raise DocumentError(f"invalid {kind} strategy: {exc}") from exc
    raise DocumentError(f"strategy: unknown kind {kind!r} (expected pure, behavioral or mixed)")


def profile_doc(profile: StrategyProfile) -> dict[str, Any]:
    return {"seat1": strategy_doc(profile.first), "seat2": strategy_doc(profile.second)}


def profile_from_doc(doc: Mapping[str, Any]) -> StrategyProfile:
    return StrategyProfile(
        strategy_from_doc(_field(doc, "seat1", "profile")),
        strategy_from_doc(_field(doc, "seat2", "profile")),
    )


def _pair(values) -> list[str]:
    return [encode_rational(v) for v in values]


def _unpair(doc) -> tuple[Fraction, Fraction]:
    if not isinstance(doc, list) or len(doc) != 2:
        raise DocumentError(f"expected a pair of rationals, got {doc!r}")
    return decode_rational(doc[0]), decode_rational(doc[1])


def outcome_doc(o: GameOutcome) -> dict[str, str]:
    return {"h": encode_rational(o.h), "ai": encode_rational(o.ai)}


def outcome_from_doc(doc) -> GameOutcome:
    return GameOutcome(decode_rational(_field(doc, "h", "outcome")), decode_rational(_field(doc, "ai", "outcome")))


# ---------------------------------------------------------------- reports


def _solve_doc(r: SolveResult):
    return {"type": "solve_result", "profile": profile_doc(r.profile), "payoffs": _pair(r.payoffs), "unique": r.unique}


def _solve_from(d):
    return SolveResult(profile_from_doc(d["profile"]), _unpair(d["payoffs"]), bool(d["unique"]))


def _br_doc(r: BestResponseResult):
    return {
        "type": "best_response",
        "seat": r.seat,
        "strategy": strategy_doc(r.strategy),
        "value": encode_rational(r.value),
        "ties": r.ties,
    }


def _br_from(d):
    return BestResponseResult(d["seat"], strategy_from_doc(d["strategy"]), decode_rational(d["value"]), d["ties"])


def _nash_doc(r: NashVerdict):
    return {
        "type": "nash_verdict",
        "is_nash": r.is_nash,
        "max_gain": encode_rational(r.max_gain),
        "gains": _pair(r.gains),
        "deviation": strategy_doc(r.deviation) if r.deviation else None,
    }


def _nash_from(d):
    dev = strategy_from_doc(d["deviation"]) if d.get("deviation") else None
    return NashVerdict(d["is_nash"], decode_rational(d["max_gain"]), _unpair(d["gains"]), dev)


def _spne_doc(r: SpneVerdict):
    return {
        "type": "spne_verdict",
        "is_spne": r.is_spne,
        "witness": r.witness,
        "detail": _nash_doc(r.detail) if r.detail else None,
    }


def _spne_from(d):
    return SpneVerdict(d["is_spne"], d.get("witness"), _nash_from(d["detail"]) if d.get("detail") else None)


def _contest_doc(r: ContestReport):
    return {
        "type": "contest_report",
        "k": r.k,
        "h_mode": r.h_mode,
        "g1": outcome_doc(r.g1),
        "g2": outcome_doc(r.g2),
        "stage_totals": outcome_doc(r.stage),
        "totals": outcome_doc(r.totals),
        "h_responses": {"seat1": strategy_doc(r.h_responses[0]), "seat2": strategy_doc(r.h_responses[1])},
        "verdict": r.verdict,
    }


def _contest_from(d):
    return ContestReport(
        k=d["k"],
        h_mode=d["h_mode"],
        g1=outcome_from_doc(d["g1"]),
        g2=outcome_from_doc(d["g2"]),
        stage=outcome_from_doc(d["stage_totals"]),
        totals=outcome_from_doc(d["totals"]),
        h_responses=(strategy_from_doc(d["h_responses"]["seat1"]), strategy_from_doc(d["h_responses"]["seat2"])),
        verdict=d["verdict"],
    )


def _step_doc(s: StepResult):
    return {"name": s.name, "status": s.status, "values": _encode_any(s.values), "notes": list(s.notes)}


def _step_from(d):
    return StepResult(d["name"], d["status"], _decode_any(d["values"]), tuple(d["notes"]))


def _entry_doc(e: RoleEntry):
    return {"index": e.index, "ai": strategy_doc(e.ai), "h": strategy_doc(e.h), "outcome": outcome_doc(e.outcome)}


def _entry_from(d):
    return RoleEntry(d["index"], strategy_from_doc(d["ai"]), strategy_from_doc(d["h"]), outcome_from_doc(d["outcome"]))


def _record_doc(r: CounterexampleRecord):
    return {
        "ai_seat1": strategy_doc(r.ai_seat1),
        "ai_seat2": strategy_doc(r.ai_seat2),
        "h_seat1": strategy_doc(r.h_seat1),
        "h_seat2": strategy_doc(r.h_seat2),
        "g1": outcome_doc(r.g1),
        "g2": outcome_doc(r.g2),
        "totals": outcome_doc(r.totals),
        "margin": encode_rational(r.margin),
        "benchmark": encode_rational(r.benchmark),
        "ai_vs_benchmark": dict(r.ai_vs_benchmark),
    }


def _record_from(d):
    return CounterexampleRecord(
        ai_seat1=strategy_from_doc(d["ai_seat1"]),
        ai_seat2=strategy_from_doc(d["ai_seat2"]),
        h_seat1=strategy_from_doc(d["h_seat1"]),
        h_seat2=strategy_from_doc(d["h_seat2"]),
        g1=outcome_from_doc(d["g1"]),
        g2=outcome_from_doc(d["g2"]),
        totals=outcome_from_doc(d["totals"]),
        margin=decode_rational(d["margin"]),
        benchmark=decode_rational(d["benchmark"]),
        ai_vs_benchmark=dict(d["ai_vs_benchmark"]),
    )


def _config_doc(c: AuditConfig):
    return {
        "m": c.m,
        "grid": encode_rational(c.grid),
        "c_min": encode_rational(c.c_min),
        "filter": c.filter,
        "budget": c.budget,
        "max_listed": c.max_listed,
    }


def _config_from(d):
    return AuditConfig(
        m=d["m"],
        grid=decode_rational(d["grid"]),
        c_min=decode_rational(d["c_min"]),
        filter=d["filter"],
        budget=d["budget"],
        max_listed=d["max_listed"],
    )


def _audit_doc(r: AuditReport):
    sweep = None
    if r.sweep is not None:
        sweep = {
            "m": r.sweep.m,
            "g1_entries": [_entry_doc(e) for e in r.sweep.g1_entries],
            "g2_entries": [_entry_doc(e) for e in r.sweep.g2_entries],
            "record_count": r.sweep.record_count,
            "records": [_record_doc(x) for x in r.sweep.records],
        }
    return {
        "type": "audit_report",
        "config": _config_doc(r.config),
        "steps": [_step_doc(s) for s in r.steps],
        "sweep": sweep,
        "counterexamples": r.counterexamples,
        "digest": r.digest,
    }


def _audit_from(d):
    steps = tuple(_step_from(s) for s in d["steps"])
    sweep = None
    if d.get("sweep") is not None:
        s = d["sweep"]
        sweep = SweepResult(
            step=next(x for x in steps if x.name == "sweep"),
            m=s["m"],
            g1_entries=tuple(_entry_from(e) for e in s["g1_entries"]),
            g2_entries=tuple(_entry_from(e) for e in s["g2_entries"]),
            record_count=s["record_count"],
            records=tuple(_record_from(x) for x in s["records"]),
        )
    return AuditReport(_config_from(d["config"]), steps, sweep, d["digest"])


_ENCODERS = [
    (GameTree, tree_doc),
    ((PureStrategy, BehavioralStrategy, MixedStrategy), strategy_doc),
    (StrategyProfile, profile_doc),
    (SolveResult, _solve_doc),
    (BestResponseResult, _br_doc),
    (NashVerdict, _nash_doc),
    (SpneVerdict, _spne_doc),
    (ContestReport, _contest_doc),
    (StepResult, _step_doc),
    (RoleEntry, _entry_doc),
    (CounterexampleRecord, _record_doc),
    (AuditConfig, _config_doc),
    (AuditReport, _audit_doc),
    (GameOutcome, outcome_doc),
]

_DECODERS = {
    GameTree: tree_from_doc,
    PureStrategy: strategy_from_doc,
    BehavioralStrategy: strategy_from_doc,
    MixedStrategy: strategy_from_doc,
    StrategyProfile: profile_from_doc,
    SolveResult: _solve_from,
    BestResponseResult: _br_from,
    NashVerdict: _nash_from,
    SpneVerdict: _spne_from,
    ContestReport: _contest_from,
    StepResult: _step_from,
    RoleEntry: _entry_from,
    CounterexampleRecord: _record_from,
    AuditConfig: _config_from,
    AuditReport: _audit_from,
    GameOutcome: outcome_from_doc,
}


def to_doc(value: Any) -> Any:
    for cls, encode in _ENCODERS:
        if isinstance(value, cls):
            return encode(value)
    raise TypeError(f"no document form for {type(value).__name__}")


def from_doc(doc: Any, cls: type) -> Any:
    try:
        decode = _DECODERS[cls]
    except KeyError:
        raise TypeError(f"no document form for {cls.__name__}") from None
    try:
        value = decode(doc)
    except DocumentError:
        raise
    except (KeyError, TypeError, IndexError, StopIteration) as exc:
        raise DocumentError(f"malformed {cls.__name__} document: {exc!r}") from exc
    if cls in (PureStrategy, BehavioralStrategy, MixedStrategy) and not isinstance(value, cls):
        raise DocumentError(f"expected a {cls.__name__}, got {type(value).__name__}")
    return value


def serialize(value: Any) -> str:
    return json.dumps(to_doc(value), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def deserialize(text: str | bytes, cls: type) -> Any:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON: {exc}") from exc
    return from_doc(doc, cls)


def report_digest(report: AuditReport) -> str:
    """SHA-256 of the report's canonical form with the digest field blank."""
    body = serialize(replace(report, digest=""))
    return hashlib.sha256(body.encode("utf-8")).hexdigest()
