"""Command-line interface: train, extract, generate, verify, bench.

Exit codes: 0 ok, 2 parse or validation error, 3 generation error,
4 verification mismatch, 5 out of bounds with no fallback grammar.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .document import (
    load_grammar,
    read_corpus,
    read_goal_types,
    read_responses,
    save_grammar,
    write_goal_types,
    write_responses,
)
from .errors import GrammarError, InvalidGoal, OutOfBounds, ParseError, UnificationFailure, ValidationError
from .extractor import GoalTypeSet, extract_subgrammar, extract_sublexicon, verify_consistency
from .generator import generate_sentence
from .telemetry import benchmark, collect_goal_types, growth_curve_csv

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_GENERATION = 3
EXIT_MISMATCH = 4
EXIT_OUT_OF_BOUNDS = 5

FALLBACK_MARK = "[fallback] "


class CliError(Exception):
    def __init__(self, code: int, error: BaseException | str):
        super().__init__(str(error))
        self.code = code
        self.error = error


def _load(path: str):
    try:
        return load_grammar(path)
    except (ParseError, ValidationError) as exc:
        raise CliError(EXIT_INPUT, exc) from None
    except OSError as exc:
        raise CliError(EXIT_INPUT, exc) from None


def _corpus(path: str):
    try:
        return read_corpus(path)
    except (ParseError, OSError) as exc:
        raise CliError(EXIT_INPUT, exc) from None


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def cmd_train(args) -> int:
    lattice, lexicon = _load(args.grammar)
    corpus = _corpus(args.corpus)
    training = collect_goal_types(lattice, lexicon, corpus, provenance=Path(args.corpus).name)
    for w in training.warnings:
        print(f"warning: {w}", file=sys.stderr)
    write_goal_types(training.goal.types, args.output)
    if args.curve:
        _write(args.curve, growth_curve_csv(training.series))
    if args.responses:
        write_responses(training.responses, training.usage, args.responses)
    plateau = training.series.plateau()
    print(
        f"{len(corpus)} sentences, {len(training.goal)} of {len(lattice.types)} types used"
        + (f", no new types after sentence {plateau}" if plateau else "")
    )
    return EXIT_OK


def cmd_extract(args) -> int:
    lattice, lexicon = _load(args.grammar)
    try:
        goal = read_goal_types(args.types)
    except OSError as exc:
        raise CliError(EXIT_INPUT, exc) from None
    responses = None
    if args.prune_choosers:
        responses, _ = read_responses(args.prune_choosers)
    try:
        sub, report = extract_subgrammar(lattice, GoalTypeSet(goal, Path(args.types).name), responses)
    except (InvalidGoal, UnificationFailure) as exc:
        raise CliError(EXIT_INPUT, exc) from None
    usage = set(lexicon)
    if args.usage:
        _, usage = read_responses(args.usage)
    sub_lexicon = extract_sublexicon(lexicon, sub.types, usage, report.excised_types)
    save_grammar(sub, sub_lexicon, args.output)
    if args.report:
        _write(args.report, report.dumps())
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    sys.stdout.write(report.format_table())
    return EXIT_OK


def cmd_generate(args) -> int:
    path = args.sub or args.grammar
    if path is None:
        raise CliError(EXIT_INPUT, "generate needs -g or -G")
    lattice, lexicon = _load(path)
    fallback = _load(args.fallback) if args.fallback else None
    corpus = _corpus(args.specs)
    if args.index is not None:
        if not 1 <= args.index <= len(corpus):
            raise CliError(EXIT_INPUT, f"index {args.index} outside 1..{len(corpus)}")
        chosen = [(args.index, corpus[args.index - 1])]
    else:
        chosen = list(enumerate(corpus, start=1))
    status = EXIT_OK
    for i, spec in chosen:
        try:
            print(generate_sentence(lattice, lexicon, spec).text)
            continue
        except OutOfBounds as exc:
            if fallback is None:
                print(f"error: sentence {i}: {exc}", file=sys.stderr)
                status = status or EXIT_OUT_OF_BOUNDS
                continue
        except GrammarError as exc:
            print(f"error: sentence {i}: {exc}", file=sys.stderr)
            status = status or EXIT_GENERATION
            continue
        try:
            print(FALLBACK_MARK + generate_sentence(fallback[0], fallback[1], spec).text)
        except GrammarError as exc:
            print(f"error: sentence {i} (fallback): {exc}", file=sys.stderr)
            status = status or EXIT_GENERATION
    return status


def cmd_verify(args) -> int:
    full, lexicon = _load(args.grammar)
    sub, sub_lexicon = _load(args.sub)
    report = verify_consistency(full, sub, _corpus(args.corpus), lexicon, sub_lexicon)
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        sys.stdout.write(report.format())
    return EXIT_OK if report.all_equal else EXIT_MISMATCH


def cmd_bench(args) -> int:
    full, lexicon = _load(args.grammar)
    sub, sub_lexicon = _load(args.sub)
    result = benchmark(full, sub, _corpus(args.corpus), lexicon, sub_lexicon, wall_clock=args.wall_clock)
    if args.json:
        print(json.dumps(result.to_json(), indent=2))
    else:
        sys.stdout.write(result.format_table())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subgrammar", description=__doc__.splitlines()[0])
    p.add_argument("--json-errors", action="store_true", help="report errors as JSON on stderr")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="collect goal types from a corpus")
    t.add_argument("-g", "--grammar", required=True)
    t.add_argument("-c", "--corpus", required=True)
    t.add_argument("-o", "--output", required=True, help="goal-type file to write")
    t.add_argument("--curve", help="growth curve CSV to write")
    t.add_argument("--responses", help="inquiry responses and lexical usage JSON to write")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("extract", help="extract the subgrammar for a goal-type file")
    e.add_argument("-g", "--grammar", required=True)
    e.add_argument("-t", "--types", required=True)
    e.add_argument("-o", "--output", required=True)
    e.add_argument("--prune-choosers", metavar="RESPONSES", help="prune choosers to observed responses")
    e.add_argument("--usage", metavar="RESPONSES", help="lexical usage for the sublexicon")
    e.add_argument("--report", help="extraction report JSON to write")
    e.set_defaults(func=cmd_extract)

    g = sub.add_parser("generate", help="generate text for semantic specs")
    g.add_argument("-g", "--grammar")
    g.add_argument("-G", "--sub", help="subgrammar to generate with (takes precedence over -g)")
    g.add_argument("-s", "--specs", required=True)
    g.add_argument("-n", "--index", type=int, help="1-based spec index")
    g.add_argument("--fallback", help="full grammar used when the subgrammar is out of bounds")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="compare full and subgrammar output on a corpus")
    v.add_argument("-g", "--grammar", required=True)
    v.add_argument("-G", "--sub", required=True)
    v.add_argument("-c", "--corpus", required=True)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="step-count benchmark of full against subgrammar")
    b.add_argument("-g", "--grammar", required=True)
    b.add_argument("-G", "--sub", required=True)
    b.add_argument("-c", "--corpus", required=True)
    b.add_argument("--json", action="store_true")
    b.add_argument("--wall-clock", action="store_true", help="also time each sentence")
    b.set_defaults(func=cmd_bench)
    return p


def _report_error(args, code: int, error) -> None:
    if args.json_errors:
        obj = {"exitCode": code, "error": type(error).__name__ if not isinstance(error, str) else "Error",
               "message": str(error)}
        for attr in ("line", "column"):
            if getattr(error, attr, None) is not None:
                obj[attr] = getattr(error, attr)
        print(json.dumps(obj), file=sys.stderr)
    else:
        print(f"error: {error}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        _report_error(args, exc.code, exc.error)
        return exc.code
    except OutOfBounds as exc:
        _report_error(args, EXIT_OUT_OF_BOUNDS, exc)
        return EXIT_OUT_OF_BOUNDS
    except GrammarError as exc:
        _report_error(args, EXIT_GENERATION, exc)
        return EXIT_GENERATION


if __name__ == "__main__":
    sys.exit(main())
