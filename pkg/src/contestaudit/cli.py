"""Command-line entry point.

Exit statuses: 0 ok, 1 usage error, 2 invalid input file, 3 audit finished
with counterexample records, 4 budget exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .centipede import make_centipede
from .contest import ContestSpec, play_contest
from .harness import DEFAULT_BUDGET, DEFAULT_MAX_LISTED, FILTER_MODES, AuditConfig, run_audit
from .serialize import (
    DocumentError,
    encode_rational,
    serialize,
    strategy_from_doc,
    tree_from_doc,
)
from .solvers import BudgetExceeded, backward_induction, best_response, is_nash, is_spne
from .strategy import StrategyError, StrategyProfile, check_strategy
from .tree import GameTree, TreeValidationError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_COUNTEREXAMPLES = 3
EXIT_BUDGET = 4


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the same directory, then rename over ``path``."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    umask = os.umask(0)
    os.umask(umask)
    try:
        os.chmod(tmp, 0o666 & ~umask)
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"{path} is not valid UTF-8 JSON: {exc}") from exc


def load_game(path: str) -> GameTree:
    try:
        return tree_from_doc(_read_json(path))
    except (DocumentError, TreeValidationError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def load_strategy(path: str, tree: GameTree, seat: int):
    try:
        strategy = strategy_from_doc(_read_json(path))
        if strategy.seat != seat:
            raise StrategyError(f"expected a seat-{seat} strategy, file has seat {strategy.seat}")
        check_strategy(tree, strategy)
    except (DocumentError, StrategyError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    return strategy


def _csv_text(header: Sequence[str], rows: list[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([encode_rational(v) if isinstance(v, Fraction) else v for v in row])
    return buf.getvalue()


def _emit(args, value, csv_header=None, csv_rows=None, echo=False) -> None:
    """Write the document to ``--out`` (or stdout when ``echo``) and the CSV table."""
    text = serialize(value)
    if args.out:
        write_atomic(args.out, text)
    elif echo:
        sys.stdout.write(text)
    if getattr(args, "csv", None) and csv_header is not None:
        write_atomic(args.csv, _csv_text(csv_header, csv_rows or []))


def _fmt_pair(pair) -> str:
    return "(" + ", ".join(encode_rational(v) for v in pair) + ")"


def _fmt_choices(strategy) -> str:
    return " ".join(f"{n}={a}" for n, a in strategy.choices.items()) or "-"


# ---------------------------------------------------------------- commands


def cmd_centipede(args) -> int:
    tree = make_centipede(args.m)
    rows = [[z, *tree.payoffs(z)] for z in tree.terminals()]
    _emit(args, tree, ["terminal", "u1", "u2"], rows, echo=True)
    return EXIT_OK


def cmd_solve_spne(args) -> int:
    tree = load_game(args.game)
    result = backward_induction(tree)
    print(f"seat 1: {_fmt_choices(result.profile.first)}")
    print(f"seat 2: {_fmt_choices(result.profile.second)}")
    print(f"payoff: {_fmt_pair(result.payoffs)} unique: {str(result.unique).lower()}")
    rows = [[n, result.profile[tree[n].owner].choices[n]] for n in tree.decision_nodes()]
    _emit(args, result, ["node", "action"], rows)
    return EXIT_OK


def cmd_solve_br(args) -> int:
    if args.player is None or args.opponent is None:
        raise UsageError("solve br needs --player and --opponent")
    tree = load_game(args.game)
    opponent = load_strategy(args.opponent, tree, 3 - args.player)
    result = best_response(tree, args.player, opponent)
    print(f"seat {args.player} best response: {_fmt_choices(result.strategy)}")
    print(f"value: {encode_rational(result.value)} ties: {result.ties}")
    _emit(args, result)
    return EXIT_OK


def cmd_check(args) -> int:
    if args.s1 is None or args.s2 is None:
        raise UsageError(f"check {args.which} needs --s1 and --s2")
    tree = load_game(args.game)
    profile = StrategyProfile(load_strategy(args.s1, tree, 1), load_strategy(args.s2, tree, 2))
    if args.which == "nash":
        verdict = is_nash(tree, profile)
        print(f"nash: {str(verdict.is_nash).lower()} max gain: {encode_rational(verdict.max_gain)}")
    else:
        verdict = is_spne(tree, profile)
        print(f"spne: {str(verdict.is_spne).lower()} witness: {verdict.witness or '-'}")
    _emit(args, verdict)
    return EXIT_OK


def cmd_contest(args) -> int:
    if args.ai_p1 is None or args.ai_p2 is None:
        raise UsageError("contest needs --ai-p1 and --ai-p2")
    tree = load_game(args.game)
    ai1 = load_strategy(args.ai_p1, tree, 1)
    ai2 = load_strategy(args.ai_p2, tree, 2)
    h = None
    if args.h_p1 or args.h_p2:
        if not (args.h_p1 and args.h_p2):
            raise UsageError("explicit H strategies need both --h-p1 and --h-p2")
        h = (load_strategy(args.h_p1, tree, 1), load_strategy(args.h_p2, tree, 2))
    report = play_contest(ContestSpec(tree, ai1, ai2, k=args.k, h_strategies=h))
    print(f"totals: H {encode_rational(report.totals.h)} AI {encode_rational(report.totals.ai)}"
          f" verdict: {report.verdict}")
    rows = [
        ["G1", report.g1.h, report.g1.ai],
        ["G2", report.g2.h, report.g2.ai],
        ["stage", report.stage.h, report.stage.ai],
        ["total", report.totals.h, report.totals.ai],
    ]
    _emit(args, report, ["game", "h", "ai"], rows)
    return EXIT_OK


def cmd_audit(args) -> int:
    config = AuditConfig(
        m=args.m,
        grid=args.grid,
        c_min=args.c_min,
        filter=args.filter,
        budget=args.budget,
        max_listed=None if args.max_listed < 0 else args.max_listed,
    )
    report = run_audit(config)
    for step in report.steps:
        print(f"{step.name}: {step.status}")
        for note in step.notes:
            print(f"  note: {note}")
    print(f"counterexamples: {report.counterexamples}")
    print(f"digest: {report.digest}")
    if args.out:
        write_atomic(args.out, serialize(report))
    if args.csv and report.sweep is not None:
        rows = [
            [r.margin, r.g1.h, r.g1.ai, r.g2.h, r.g2.ai, r.totals.h, r.totals.ai,
             r.ai_vs_benchmark["g1"], r.ai_vs_benchmark["g2"]]
            for r in report.sweep.records
        ]
        header = ["margin", "g1_h", "g1_ai", "g2_h", "g2_ai", "total_h", "total_ai",
                  "g1_ai_vs_benchmark", "g2_ai_vs_benchmark"]
        write_atomic(args.csv, _csv_text(header, rows))
    if report.budget_skipped:
        return EXIT_BUDGET
    return EXIT_COUNTEREXAMPLES if report.counterexamples else EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="contestaudit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, game=True):
        if game:
            p.add_argument("--game", required=True, help="game tree JSON file")
        p.add_argument("--out", help="write the canonical JSON document here (default: stdout)")

    p = sub.add_parser("centipede", help="generate an increasing-sum centipede game")
    p.add_argument("--m", type=int, required=True, help="number of decision nodes (even, >= 2)")
    common(p, game=False)
    p.add_argument("--csv", help="also write the terminal payoff table as CSV")
    p.set_defaults(func=cmd_centipede)

    p = sub.add_parser("solve", help="solve a game")
    solve = p.add_subparsers(dest="solver", required=True, parser_class=_Parser)
    q = solve.add_parser("spne", help="backward induction")
    common(q)
    q.add_argument("--csv", help="also write the chosen action per node as CSV")
    q.set_defaults(func=cmd_solve_spne)
    q = solve.add_parser("br", help="best response to an opponent strategy")
    common(q)
    q.add_argument("--player", type=int, choices=(1, 2), help="responding seat")
    q.add_argument("--opponent", help="opponent strategy JSON file")
    q.set_defaults(func=cmd_solve_br)

    p = sub.add_parser("check", help="check a strategy profile")
    p.add_argument("which", choices=("nash", "spne"))
    common(p)
    p.add_argument("--s1", help="seat-1 strategy JSON file")
    p.add_argument("--s2", help="seat-2 strategy JSON file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("contest", help="role-swapped contest against a committed AI")
    common(p)
    p.add_argument("--ai-p1", help="AI strategy when it moves first (seat 1)")
    p.add_argument("--ai-p2", help="AI strategy when H moves first (seat 2)")
    p.add_argument("--h-p1", help="explicit H seat-1 strategy (default: best response)")
    p.add_argument("--h-p2", help="explicit H seat-2 strategy (default: best response)")
    p.add_argument("--k", type=int, default=1, help="repetitions (default 1)")
    p.add_argument("--csv", help="also write the payoff table as CSV")
    p.set_defaults(func=cmd_contest)

    p = sub.add_parser("audit", help="audit the centipede impossibility argument")
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--grid", type=_rational_arg, default=Fraction(1, 4), help="probability grid step, 1/n")
    p.add_argument("--c-min", type=_rational_arg, default=Fraction(1, 4), help="root-continue floor")
    p.add_argument("--filter", choices=FILTER_MODES, default="root-only")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max strategy pairs per step")
    p.add_argument("--max-listed", type=int, default=DEFAULT_MAX_LISTED,
                   help="records written out in full, worst first (-1: all)")
    p.add_argument("--out", help="write the audit report JSON here")
    p.add_argument("--csv", help="also write the listed records as CSV")
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "k", 1) < 1:
        parser.error("--k must be at least 1")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except InputError as exc:
        print(f"contestaudit: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"contestaudit: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"contestaudit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
