"""Command-line front end.

Parses one of the text formats, dispatches the matching solver, and
prints a JSON report on standard output.  Diagnostics go to standard
error.  Exit codes: 0 success, 2 usage, 3 malformed input, 4 budget
exhausted (a partial report is still printed).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from .arena import (
    FormatError,
    format_arena,
    format_automaton,
    parse_arena,
    parse_automaton,
)
from .rational import format_rational, parse_rational
from .regret_all import (
    BudgetExceeded,
    decimal_string,
    regret_all,
    zero_regret_all,
)
from .regret_positional import (
    oracle_interval_positional,
    regret_positional,
    zero_regret_positional,
)
from .regret_word import (
    epsilon_gap,
    oracle_interval_word,
    zero_regret_word,
)
from .reductions import aval_gadget, gen_2dp, gen_sat, parse_cnf, parse_digraph
from .strategies import eval_strategy_regret, strategy_from_json, synth_otp
from .values import value_table


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}")


def _is_automaton_text(text: str) -> bool:
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.split()[0] == "alphabet":
            return True
    return False


def _load_arena(path: str):
    text = _read(path)
    if _is_automaton_text(text):
        raise FormatError(f"{path} holds an automaton; this command needs an arena")
    return parse_arena(text)


def _load_automaton(path: str):
    text = _read(path)
    if not _is_automaton_text(text):
        raise FormatError(f"{path} holds an arena; this command needs an automaton")
    return parse_automaton(text)


def _rational_arg(token: str) -> Fraction:
    try:
        return parse_rational(token)
    except (ValueError, FormatError):
        raise argparse.ArgumentTypeError(f"not a rational: {token!r}")


def _interval_json(interval) -> dict:
    lo, hi = interval
    return {
        "interval": [format_rational(lo), format_rational(hi)],
        "decimal": [decimal_string(lo), decimal_string(hi)],
    }


def _cmd_values(args) -> dict:
    arena = _load_arena(args.file)
    return {"mode": "values", "values": value_table(arena).to_json()}


def _cmd_zero_regret(args) -> dict:
    report: dict = {"mode": "zero-regret", "adversary": args.adversary}
    if args.adversary == "all":
        arena = _load_arena(args.file)
        res = zero_regret_all(arena)
        report["answer"] = res.zero
        report["witness"] = res.witness.to_json(arena)
        report["bad_edges"] = [
            [arena.names[u], arena.names[v]] for u, v in res.bad
        ]
        report["stats"] = {}
    elif args.adversary == "positional":
        arena = _load_arena(args.file)
        res = zero_regret_positional(
            arena, **({"budget": args.budget} if args.budget else {})
        )
        report["answer"] = res.zero
        report["witness"] = res.witness.to_json(arena)
        report["stats"] = {"nodes": res.states}
    else:
        automaton = _load_automaton(args.file)
        kwargs = {"budget": args.budget} if args.budget else {}
        answer, witness = zero_regret_word(automaton, **kwargs)
        report["answer"] = answer
        report["witness"] = witness.to_json(automaton) if witness else None
        report["stats"] = {}
    return report


def _cmd_regret(args) -> dict:
    arena = _load_arena(args.file)
    kwargs = {"budget": args.budget} if args.budget else {}
    solver = regret_all if args.adversary == "all" else regret_positional
    res = solver(arena, **kwargs)
    report = {
        "mode": "regret",
        "adversary": args.adversary,
        "value": format_rational(res.value),
        "decimal": decimal_string(res.value),
        "horizon": res.horizon,
        "witness": res.witness.to_json(arena) if res.witness is not None else None,
        "stats": {"nodes": res.nodes},
    }
    notes = getattr(res, "notes", ())
    if notes:
        report["notes"] = list(notes)
    if args.threshold is not None:
        report["threshold"] = format_rational(args.threshold)
        report["strict"] = args.strict
        report["answer"] = (
            res.value < args.threshold if args.strict else res.value <= args.threshold
        )
    return report


def _cmd_epsilon_gap(args) -> dict:
    automaton = _load_automaton(args.file)
    kwargs = {"budget": args.budget} if args.budget else {}
    res = epsilon_gap(automaton, args.r, args.epsilon, **kwargs)
    return {
        "mode": "epsilon-gap",
        "r": format_rational(args.r),
        "epsilon": format_rational(args.epsilon),
        "answer": "YES" if res.answer else "NO",
        "horizon": res.horizon,
        "stats": {"states": res.states},
    }


def _cmd_synth(args) -> dict:
    arena = _load_arena(args.file)
    strategy = synth_otp(arena, args.t)
    return {
        "mode": "synth",
        "threshold": format_rational(args.t),
        "strategy": strategy.to_json(arena),
    }


def _cmd_eval(args) -> dict:
    arena = _load_arena(args.file)
    try:
        obj = json.loads(_read(args.strategy))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{args.strategy}: {exc}")
    strategy = strategy_from_json(arena, obj)
    kwargs = {"budget": args.budget} if args.budget else {}
    value = eval_strategy_regret(arena, strategy, **kwargs)
    return {
        "mode": "eval",
        "value": format_rational(value),
        "decimal": decimal_string(value),
    }


def _cmd_oracle(args) -> dict:
    kwargs = {"budget": args.budget} if args.budget else {}
    if args.adversary == "positional":
        arena = _load_arena(args.file)
        interval = oracle_interval_positional(arena, args.depth, **kwargs)
    else:
        automaton = _load_automaton(args.file)
        interval = oracle_interval_word(automaton, args.depth, **kwargs)
    report = {"mode": "oracle", "adversary": args.adversary, "depth": args.depth}
    report.update(_interval_json(interval))
    return report


def _cmd_gen(args) -> dict:
    if args.construction == "aval-gadget":
        arena = _load_arena(args.file)
        instance = aval_gadget(arena)
    elif args.construction == "2dp":
        graph = parse_digraph(_read(args.file))
        instance = gen_2dp(graph, args.s1, args.t1, args.s2, args.t2, args.lam, args.r)
    else:
        cnf = parse_cnf(_read(args.file))
        instance = gen_sat(cnf, args.lam)
    artifact = instance.artifact
    text = (
        format_automaton(artifact)
        if instance.to_json()["kind"] == "automaton"
        else format_arena(artifact)
    )
    try:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        raise FormatError(f"cannot write {args.output}: {exc.strerror}")
    report = {"mode": "gen", "construction": args.construction, "output": args.output}
    report.update(instance.to_json())
    return report


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--budget", type=int, default=None, help="node budget override"
    )
    common.add_argument(
        "--deterministic",
        action="store_true",
        help="byte-stable output: omit wall time",
    )

    parser = argparse.ArgumentParser(
        prog="dsregret",
        description="Regret of discounted-sum games on weighted arenas and automata.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("values", parents=[common], help="per-vertex aVal/cVal table")
    p.add_argument("file")
    p.set_defaults(run=_cmd_values)

    p = sub.add_parser("zero-regret", parents=[common], help="decide regret = 0")
    p.add_argument("--adversary", required=True, choices=["all", "positional", "word"])
    p.add_argument("file")
    p.set_defaults(run=_cmd_zero_regret)

    p = sub.add_parser("regret", parents=[common], help="exact regret value")
    p.add_argument("--adversary", required=True, choices=["all", "positional"])
    p.add_argument("--threshold", type=_rational_arg, default=None)
    p.add_argument("--strict", action="store_true")
    p.add_argument("file")
    p.set_defaults(run=_cmd_regret)

    p = sub.add_parser(
        "epsilon-gap", parents=[common], help="gap-promise threshold decision"
    )
    p.add_argument("--r", type=_rational_arg, required=True)
    p.add_argument("--epsilon", type=_rational_arg, required=True)
    p.add_argument("file")
    p.set_defaults(run=_cmd_epsilon_gap)

    p = sub.add_parser("synth", parents=[common], help="optimistic-then-pessimistic strategy")
    p.add_argument("--t", type=_rational_arg, required=True, help="regret threshold")
    p.add_argument("file")
    p.set_defaults(run=_cmd_synth)

    p = sub.add_parser("eval", parents=[common], help="regret of a stored strategy")
    p.add_argument("--strategy", required=True, help="strategy JSON file")
    p.add_argument("file")
    p.set_defaults(run=_cmd_eval)

    p = sub.add_parser("oracle", parents=[common], help="certified regret interval")
    p.add_argument("--adversary", required=True, choices=["positional", "word"])
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("file")
    p.set_defaults(run=_cmd_oracle)

    p = sub.add_parser("gen", parents=[common], help="benchmark instance generators")
    gensub = p.add_subparsers(dest="construction", required=True)
    g = gensub.add_parser("aval-gadget", parents=[common])
    g.add_argument("file", help="arena to wrap")
    g.add_argument("-o", "--output", required=True, help="artifact path")
    g.set_defaults(run=_cmd_gen)
    g = gensub.add_parser("2dp", parents=[common])
    g.add_argument("file", help="digraph in DIMACS-like format")
    g.add_argument("--s1", type=int, required=True)
    g.add_argument("--t1", type=int, required=True)
    g.add_argument("--s2", type=int, required=True)
    g.add_argument("--t2", type=int, required=True)
    g.add_argument("--lambda", dest="lam", type=_rational_arg, required=True)
    g.add_argument("--r", type=_rational_arg, required=True)
    g.add_argument("-o", "--output", required=True, help="artifact path")
    g.set_defaults(run=_cmd_gen)
    g = gensub.add_parser("sat", parents=[common])
    g.add_argument("file", help="CNF in DIMACS format")
    g.add_argument(
        "--lambda", dest="lam", type=_rational_arg, default=Fraction(1, 2)
    )
    g.add_argument("-o", "--output", required=True, help="artifact path")
    g.set_defaults(run=_cmd_gen)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        report = args.run(args)
    except BudgetExceeded as exc:
        print(str(exc), file=sys.stderr)
        report = {
            "mode": args.command,
            "error": "budget-exceeded",
            "message": str(exc),
            "stats": {"nodes": exc.nodes},
        }
        partial = getattr(exc, "partial", None)
        if partial and "interval" in partial:
            report.update(_interval_json(partial["interval"]))
        _emit(report, args, started)
        return 4
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    _emit(report, args, started)
    return 0


def _emit(report: dict, args, started: float) -> None:
    if not args.deterministic:
        stats = report.setdefault("stats", {})
        stats["wall_time_ms"] = round((time.monotonic() - started) * 1000, 3)
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")


if __name__ == "__main__":
    sys.exit(main())
