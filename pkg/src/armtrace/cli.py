"""Command-line front end.

Exit codes:
    0  property holds / analysis clean
    1  property violated / emergent behavior found
    2  usage or input error
    3  state budget exceeded
"""

from __future__ import annotations

import argparse
import sys
from enum import IntEnum
from pathlib import Path

from . import report
from .emergence import OriginPhase, decompose_extended, extract_emergent, parse_log
from .errors import AlphabetMismatchError, InputError, ResourceLimitError
from .lang import DEFAULT_STATE_BUDGET, enumerate_traces, parse_automaton, state_budget
from .relations import ModelChain, check_chain, classify_evolution
from .scenario import ScenarioConfig, generate, write_bundle


class ExitStatus(IntEnum):
    CLEAN = 0
    VIOLATED = 1
    INPUT_ERROR = 2
    RESOURCE = 3


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc


def _load_automaton(path: str):
    try:
        return parse_automaton(_read(path))
    except InputError as exc:
        if str(exc).startswith(path):
            raise
        raise InputError(f"{path}: {exc}") from exc


def _load_chain(args) -> ModelChain:
    return ModelChain(_load_automaton(args.rm), _load_automaton(args.dm), _load_automaton(args.im))


def _load_log(path: str, chain: ModelChain):
    try:
        return parse_log(_read(path), chain.alphabet, source=path)
    except InputError as exc:
        if str(exc).startswith(path):
            raise
        raise InputError(f"{path}: {exc}") from exc


def cmd_classify(args):
    r = classify_evolution(_load_automaton(args.prev), _load_automaton(args.next))
    return report.evolution_doc(r), r.refinement_holds


def cmd_check(args):
    r = check_chain(_load_chain(args))
    return report.chain_doc(r), r.chain_holds


def _emergence(args):
    chain = _load_chain(args)
    em = extract_emergent(_load_log(args.log, chain), chain)
    return chain, em


def cmd_analyze(args):
    chain, em = _emergence(args)
    doc = {"chain": report.chain_doc(check_chain(chain)), "emergence": report.emergent_doc(em)}
    return doc, not em.guarantee_violated


def cmd_decompose(args):
    chain, em = _emergence(args)
    doc = {
        "chain": report.chain_doc(check_chain(chain)),
        "emergence": report.emergent_doc(em),
        "decomposition": report.decomposition_doc(decompose_extended(chain, em)),
    }
    return doc, not em.guarantee_violated


def cmd_enumerate(args):
    aut = _load_automaton(args.automaton)
    traces = enumerate_traces(aut, args.max_len)
    return {"max_len": args.max_len, "traces": [list(t) for t in traces]}, True


def cmd_gen(args):
    extra = {
        OriginPhase.REQUIREMENTS_GAP: args.requirements_gaps,
        OriginPhase.DESIGN_GAP: args.design_gaps,
        OriginPhase.IMPLEMENTATION_GAP: args.implementation_gaps,
    }
    try:
        cfg = ScenarioConfig(
            seed=args.seed,
            alphabet_size=args.alphabet_size,
            states_per_model=args.states,
            extra_traces_per_phase=extra,
            log_size=args.log_size,
            max_trace_len=args.max_len,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    scenario = generate(cfg)
    try:
        out = write_bundle(cfg, scenario, args.out)
    except OSError as exc:
        raise InputError(f"{args.out}: {exc.strerror or exc}") from exc
    doc = {
        "out": str(out),
        "seed": cfg.seed,
        "chain_holds": check_chain(scenario.chain).chain_holds,
        "log_size": len(scenario.log),
        "injected": [{"trace": list(t), "origin": o.value} for t, o in scenario.injected.items()],
        "notes": list(scenario.notes),
    }
    return doc, True


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "machine"), default=argparse.SUPPRESS)
    common.add_argument("--state-budget", type=_positive, default=argparse.SUPPRESS,
                        help=f"max states built by subset construction (default {DEFAULT_STATE_BUDGET})")

    parser = argparse.ArgumentParser(
        prog="armtrace",
        description="Refinement-chain and emergent-behavior analysis over trace automata.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify one evolution step")
    p.add_argument("prev")
    p.add_argument("next")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("check", parents=[common], help="check the rm/dm/im refinement chain")
    for name in ("rm", "dm", "im"):
        p.add_argument(name)
    p.set_defaults(func=cmd_check)

    for name, func, text in (
        ("analyze", cmd_analyze, "extract emergent traces from an observation log"),
        ("decompose", cmd_decompose, "analyze plus the concrete/extra split per phase"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        for arg in ("rm", "dm", "im", "log"):
            p.add_argument(arg)
        p.set_defaults(func=func)

    p = sub.add_parser("enumerate", parents=[common], help="list accepted traces up to a length")
    p.add_argument("automaton")
    p.add_argument("--max-len", type=_non_negative, required=True)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("gen", parents=[common], help="write a synthetic scenario bundle")
    p.add_argument("--seed", type=_non_negative, required=True)
    p.add_argument("--alphabet-size", type=int, default=2)
    p.add_argument("--states", type=int, default=4, help="states per model")
    p.add_argument("--log-size", type=_non_negative, default=10)
    p.add_argument("--max-len", type=_non_negative, default=6, help="max length of generated traces")
    p.add_argument("--requirements-gaps", type=_non_negative, default=0)
    p.add_argument("--design-gaps", type=_non_negative, default=0)
    p.add_argument("--implementation-gaps", type=_non_negative, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)
    return parser


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fmt = getattr(args, "format", "text")
    budget = getattr(args, "state_budget", DEFAULT_STATE_BUDGET)
    try:
        with state_budget(budget):
            result, clean = args.func(args)
    except ResourceLimitError as exc:
        print(f"armtrace: {exc}", file=stderr)
        return ExitStatus.RESOURCE
    except (InputError, AlphabetMismatchError) as exc:
        print(f"armtrace: {exc}", file=stderr)
        return ExitStatus.INPUT_ERROR
    doc = report.document(args.command, result)
    stdout.write(report.dump_report(doc) if fmt == "machine" else report.render_text(doc))
    return ExitStatus.CLEAN if clean else ExitStatus.VIOLATED


def main() -> None:
    sys.exit(run())
