"""Command-line front end.

Exit codes: 0 success, 1 processing failure, 2 input or configuration
error.  Diagnostics go to stderr; data outputs stay machine-readable.
"""

from __future__ import annotations

import argparse
import logging
import sys
from importlib.resources import files

from . import grafting, matcher, rulegen, taggers, trees
from .lexicon import LexiconError, load_lexicon_file
from .matcher import PatternSyntaxError, RewriteBudgetError
from .taggers import StandoffAnnotation
from .trees import PTBParseError

log = logging.getLogger("mn")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mn", description="Modality/negation tagging and tree grafting."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    tag = sub.add_parser("tag", help="tag a corpus with modality/negation")
    tag.add_argument("--mode", choices=["string", "structure"], required=True)
    tag.add_argument("--lexicon", required=True)
    tag.add_argument("--rules", help="rule file overriding generated rules (structure mode)")
    tag.add_argument("--registry", help="template registry file (structure mode)")
    tag.add_argument("--in", dest="input", required=True)
    tag.add_argument("--out", dest="output", required=True)
    tag.add_argument("--standoff", help="write standoff TSV here")
    tag.add_argument("--inline", action="store_true", help="write inline text instead")

    graft = sub.add_parser("graft", help="graft standoff annotations onto trees")
    graft.add_argument("--trees", required=True)
    graft.add_argument("--standoff", action="append", required=True)
    graft.add_argument("--order", default="NE,MN", help="family order, e.g. NE,MN")
    graft.add_argument("--out", dest="output", required=True)
    graft.add_argument("--report", required=True)

    flat = sub.add_parser("flatten", help="flatten trees")
    flat.add_argument("--in", dest="input", required=True)
    flat.add_argument("--out", dest="output", required=True)

    prep = sub.add_parser("preprocess", help="insert AUX/VoicePassive markers")
    prep.add_argument("--in", dest="input", required=True)
    prep.add_argument("--out", dest="output", required=True)

    rules = sub.add_parser("rules", help="dump the expanded rule set")
    rules.add_argument("--lexicon", required=True)
    rules.add_argument("--registry")
    rules.add_argument("--out", dest="output", required=True)

    agree = sub.add_parser("agreement", help="compare two standoff files")
    agree.add_argument("file_a")
    agree.add_argument("file_b")

    lex = sub.add_parser("lexicon", help="lexicon utilities")
    lex_sub = lex.add_subparsers(dest="lexicon_command", required=True)
    validate = lex_sub.add_parser("validate", help="load and validate a lexicon file")
    validate.add_argument("path")

    return parser


def _load_rules(args) -> list[matcher.PatternRule]:
    if getattr(args, "rules", None):
        with open(args.rules, encoding="utf-8") as fh:
            return matcher.parse_rules(fh.read())
    lexicon = load_lexicon_file(args.lexicon)
    registry = (
        rulegen.load_registry_file(args.registry) if args.registry else rulegen.default_registry()
    )
    return rulegen.expand_templates(lexicon, registry)


def _cmd_tag(args) -> int:
    annotations: list[StandoffAnnotation] = []
    if args.mode == "structure":
        rule_set = _load_rules(args)
        with open(args.input, encoding="utf-8") as fh:
            corpus = trees.read_ptb(fh.read())
        out_lines = []
        for i, tree in enumerate(corpus):
            prepared = rulegen.preprocess(trees.flatten(tree))
            result = taggers.tag_structure(prepared, rule_set, sentence=i)
            for diag in result.diagnostics:
                log.info("sentence %d: %s", i, diag)
            annotations.extend(result.annotations)
            if args.inline:
                out_lines.append(
                    taggers.render_inline(rulegen.word_tokens(result.tree), result.annotations)
                )
            else:
                out_lines.append(trees.write_ptb(result.tree))
        output = "".join(line + "\n" for line in out_lines)
    else:
        lexicon = load_lexicon_file(args.lexicon)
        with open(args.input, encoding="utf-8") as fh:
            sentences = taggers.read_token_tsv(fh.read())
        tagged_sentences = []
        out_lines = []
        for i, sentence in enumerate(sentences):
            result = taggers.tag_string(sentence, lexicon, sentence=i)
            for diag in result.diagnostics:
                log.info("sentence %d: %s", i, diag)
            annotations.extend(result.annotations)
            tagged_sentences.append(result.tokens)
            out_lines.append(
                taggers.render_inline([t.token for t in result.tokens], result.annotations)
            )
        if args.inline:
            output = "".join(line + "\n" for line in out_lines)
        else:
            output = taggers.format_token_tsv(tagged_sentences)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(output)
    if args.standoff:
        with open(args.standoff, "w", encoding="utf-8") as fh:
            fh.write(taggers.format_standoff(annotations))
    return 0


def _cmd_graft(args) -> int:
    with open(args.trees, encoding="utf-8") as fh:
        corpus = trees.read_ptb(fh.read())
    annotations: list[StandoffAnnotation] = []
    for path in args.standoff:
        with open(path, encoding="utf-8") as fh:
            batch = taggers.parse_standoff(fh.read())
        too_far = [a for a in batch if a.sentence >= len(corpus)]
        if too_far:
            log.error(
                "sentence counts disagree: %s refers to sentence %d but %s has %d trees",
                path,
                max(a.sentence for a in too_far),
                args.trees,
                len(corpus),
            )
            return 2
        annotations.extend(batch)
    order = tuple(args.order.split(","))
    config = grafting.GraftConfig(family_order=order)
    by_sentence: dict[int, list[StandoffAnnotation]] = {}
    for a in annotations:
        by_sentence.setdefault(a.sentence, []).append(a)
    report = grafting.GraftReport()
    out_lines = []
    for i, tree in enumerate(corpus):
        grafted, sentence_report = grafting.graft(tree, by_sentence.get(i, []), config)
        report.merge(sentence_report)
        out_lines.append(trees.write_ptb(grafted))
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write("".join(line + "\n" for line in out_lines))
    with open(args.report, "w", encoding="utf-8") as fh:
        fh.write(report.format())
    return 0


def _cmd_trees(args, transform) -> int:
    with open(args.input, encoding="utf-8") as fh:
        corpus = trees.read_ptb(fh.read())
    with open(args.output, "w", encoding="utf-8") as fh:
        for tree in corpus:
            fh.write(trees.write_ptb(transform(tree)) + "\n")
    return 0


def _cmd_rules(args) -> int:
    rule_set = _load_rules(args)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(matcher.serialize_rules(rule_set))
    return 0


def _cmd_agreement(args) -> int:
    with open(args.file_a, encoding="utf-8") as fh:
        a = taggers.parse_standoff(fh.read())
    with open(args.file_b, encoding="utf-8") as fh:
        b = taggers.parse_standoff(fh.read())
    report = taggers.agreement(a, b)
    sys.stdout.write(report.format())
    return 0


def _cmd_lexicon_validate(args) -> int:
    lexicon = load_lexicon_file(args.path)
    print(f"{len(lexicon.entries)} entries")
    return 0


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(name)s: %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "tag":
            return _cmd_tag(args)
        if args.command == "graft":
            return _cmd_graft(args)
        if args.command == "flatten":
            return _cmd_trees(args, trees.flatten)
        if args.command == "preprocess":
            return _cmd_trees(args, rulegen.preprocess)
        if args.command == "rules":
            return _cmd_rules(args)
        if args.command == "agreement":
            return _cmd_agreement(args)
        if args.command == "lexicon":
            return _cmd_lexicon_validate(args)
    except RewriteBudgetError as exc:
        log.error("rule application failed: %s", exc)
        return 1
    except (PTBParseError, LexiconError, PatternSyntaxError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return 2
    return 2


def seed_lexicon_path() -> str:
    return str(files("mntag.data").joinpath("seed_lexicon.txt"))


if __name__ == "__main__":
    sys.exit(main())
