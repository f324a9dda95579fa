"""Shared fixtures and random generators for the test suite."""

from __future__ import annotations

import itertools
import random
from pathlib import Path

import pytest

from mntag.lexicon import Lexicon, load_lexicon_file
from mntag.matcher import PatternRule, parse_pattern
from mntag.rulegen import TemplateRegistry, default_registry
from mntag.trees import ParseTree, iter_nodes

DATA = Path(__file__).parent / "data"

PHRASE_LABELS = ["S", "NP", "VP", "PP", "ADJP", "X"]
POS_LABELS = ["DT", "NN", "VB", "JJ", "RB", "MD"]


def random_tree(rng: random.Random, max_nodes: int = 12) -> ParseTree:
    """A random tree with at most ``max_nodes`` nodes and unique tokens,
    so yield-based oracles cannot be fooled by repeated words."""
    tokens = itertools.count()
    budget = [rng.randint(2, max_nodes)]

    def gen(depth: int) -> ParseTree:
        budget[0] -= 1
        if depth > 3 or budget[0] <= 1 or rng.random() < 0.3:
            tok = f"w{next(tokens)}"
            if rng.random() < 0.15:
                return ParseTree(tok, (), tok)  # bare word leaf
            return ParseTree(rng.choice(POS_LABELS), (), tok)
        width = rng.randint(1, min(3, budget[0]))
        children = tuple(gen(depth + 1) for _ in range(width))
        return ParseTree(rng.choice(PHRASE_LABELS), children, None)

    return gen(0)


def random_pattern_rule(rng: random.Random, tree: ParseTree) -> PatternRule:
    """A random pattern over the tree's own labels and tokens (plus
    misses), within the supported operator set."""
    labels = sorted({n.label for n in iter_nodes(tree)})
    tokens = sorted({n.token for n in iter_nodes(tree) if n.token is not None})
    atoms = labels + tokens + ["ZZZ"]
    counter = itertools.count()

    def simple(allow_capture: bool) -> str:
        r = rng.random()
        if r < 0.15:
            text = f"/^{rng.choice(labels)[:2]}/"
        elif r < 0.3 and len(atoms) >= 2:
            text = "|".join(rng.sample(atoms, 2))
        elif r < 0.75:
            text = rng.choice(labels)
        elif r < 0.95 and tokens:
            text = rng.choice(tokens)
        else:
            text = "ZZZ"
        if allow_capture and rng.random() < 0.5:
            text += f"=c{next(counter)}"
        return text

    parts = [simple(True)]
    for _ in range(rng.randint(0, 3)):
        relation = rng.choice(["<", "!<", "$.."])
        captures_ok = relation != "!<"
        if rng.random() < 0.4:
            inner = simple(captures_ok)
            if rng.random() < 0.5:
                inner += f" < {simple(captures_ok and rng.random() < 0.5)}"
            operand = f"({inner})"
        else:
            operand = simple(captures_ok)
        parts.append(f"{relation} {operand}")
    return parse_pattern(" ".join(parts))


@pytest.fixture(scope="session")
def seed_lexicon() -> Lexicon:
    from mntag.cli import seed_lexicon_path

    return load_lexicon_file(seed_lexicon_path())


@pytest.fixture(scope="session")
def registry() -> TemplateRegistry:
    return default_registry()


@pytest.fixture(scope="session")
def seed_rules(seed_lexicon, registry):
    from mntag.rulegen import expand_templates

    return expand_templates(seed_lexicon, registry)
