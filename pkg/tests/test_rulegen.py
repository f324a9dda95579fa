from mntag.lexicon import load_lexicon
import pytest

from mntag.matcher import parse_pattern
from mntag.rulegen import (
    expand_templates,
    inflections,
    is_marker_leaf,
    preprocess,
    word_spans,
    word_tokens,
)
from mntag.trees import flatten, read_ptb, write_ptb


def test_preprocess_passive_clause():
    tree = read_ptb(
        "(S (NP (PRP They)) (VBD were) (VBN required) (S (TO to) (VB provide) (NP (NNS tents))))"
    )[0]
    out = preprocess(tree)
    text = write_ptb(out)
    assert "(VBD were AUX)" in text
    assert "(VBN required VoicePassive)" in text
    assert "(VB provide)" in text  # no marker


def test_preprocess_skips_copular_be():
    tree = read_ptb("(S (NP (PRP he)) (MD can) (RB not) (VB be) (ADJP (JJ ignorant)))")[0]
    out = preprocess(tree)
    assert "(VB be AUX)" not in write_ptb(out)
    tree2 = read_ptb("(S (NP (DT A) (NN solution)) (MD must) (VB be) (VBN found))")[0]
    assert "(VB be AUX)" in write_ptb(preprocess(tree2))


def test_preprocess_no_auxiliaries_is_identity():
    tree = read_ptb("(S (NP (DT the) (NN cat)) (VBD sat))")[0]
    assert preprocess(tree) == tree


def test_preprocess_is_idempotent():
    tree = read_ptb("(S (NP (NNS Tents)) (VBP are) (VBN needed))")[0]
    once = preprocess(tree)
    assert preprocess(once) == once


def test_perfect_have_is_not_passive():
    tree = read_ptb("(S (NP (PRP They)) (VBP have) (VBN required) (NP (NNS tents)))")[0]
    out = write_ptb(preprocess(tree))
    assert "VoicePassive" not in out
    assert "(VBP have AUX)" in out


def test_word_tokens_exclude_markers():
    tree = preprocess(read_ptb("(S (NP (NNS Tents)) (VBP are) (VBN needed))")[0])
    assert word_tokens(tree) == ["Tents", "are", "needed"]
    spans = word_spans(tree)
    leaves = [n for n in tree.leaves() if is_marker_leaf(n)]
    assert leaves and all(id(n) not in spans for n in leaves)


def test_inflections_regular_and_override():
    lex = load_lexicon(
        "String: reach\nPos: VB\nModality: Succeed\nSubcat: T1-monotransitive-for-V3-verbs\n\n"
        "String: plan\nPos: VB\nModality: Intend\nSubcat: V3-I3-basic\nForms: plan plans planned planning\n\n"
        "String: may\nPos: MD\nModality: Permit\nSubcat: Modal-auxiliary-basic\n"
    )
    assert inflections(lex.entries[0]) == ("reach", "reaches", "reached", "reaching")
    assert inflections(lex.entries[1]) == ("plan", "plans", "planned", "planning")
    assert inflections(lex.entries[2]) == ("may",)


def test_registry_covers_all_seed_codes(seed_lexicon, registry):
    codes = {code for e in seed_lexicon.entries for code in e.subcats}
    missing = {c for c in codes if registry.get(c) is None}
    assert not missing


def test_expansion_is_deterministic(seed_lexicon, registry):
    a = expand_templates(seed_lexicon, registry)
    b = expand_templates(seed_lexicon, registry)
    assert [r.source for r in a] == [r.source for r in b]
    assert [r.name for r in a] == [r.name for r in b]


def test_every_generated_rule_parses(seed_rules):
    for rule in seed_rules:
        reparsed = parse_pattern(rule.source, name=rule.name)
        assert reparsed.pattern == rule.pattern
        assert reparsed.actions == rule.actions


def test_generated_need_passive_rule_mirrors_required_rule(seed_rules):
    by_name = {r.name: r for r in seed_rules}
    need = by_name["V3-passive-basic:need"]
    required = parse_pattern(
        "/^VB/=trigger !< /^Trig/ < require|requires|required|requiring < VoicePassive"
        " $.. (S < (/^VB/=target !< AUX))\n"
        "insert (TrigRequire) >2 trigger\ninsert (TargRequire) >2 target"
    )
    # Same shape: only the word alternation differs.
    assert len(need.pattern.clauses) == len(required.pattern.clauses)
    assert [c.relation for c in need.pattern.clauses] == [c.relation for c in required.pattern.clauses]
    assert "needed" in need.source and "TrigRequire" in need.source


def test_unresolved_codes_skipped_with_warning(registry, caplog):
    lex = load_lexicon("String: frob\nPos: VB\nModality: Able\nSubcat: NO-SUCH-CODE\n")
    with caplog.at_level("WARNING"):
        rules = expand_templates(lex, registry)
    assert rules == []
    assert "NO-SUCH-CODE" in caplog.text


def test_empty_lexicon_expands_to_nothing(registry):
    assert expand_templates(load_lexicon(""), registry) == []


def test_shipped_rule_set_is_idempotent(seed_rules):
    from mntag.matcher import apply
    from conftest import DATA
    from mntag.trees import read_ptb_file, flatten

    for tree in read_ptb_file(DATA / "corpus_trees.ptb"):
        current = preprocess(flatten(tree))
        for rule in seed_rules:
            current = apply(rule, current)
        settled = current
        for rule in seed_rules:
            settled = apply(rule, settled)
        assert settled == current


def test_every_generated_rule_fires_on_the_corpus(seed_lexicon, seed_rules):
    from conftest import DATA
    from mntag.taggers import tag_structure
    from mntag.trees import read_ptb_file

    fired = set()
    for tree in read_ptb_file(DATA / "corpus_trees.ptb"):
        result = tag_structure(preprocess(flatten(tree)), seed_rules)
        fired.update(result.fired_rules)
    expected = {rule.name for rule in seed_rules}
    assert fired == expected
