"""Graft standoff annotations onto parse trees.

Each annotation's token span is classified against the tree:

* Exact: some constituent covers exactly the span.  The tag is grafted
  as a ``-`` label suffix on every node of the same-span ancestor
  chain, so a tag on a word inside unary shells reaches the highest
  constituent with that yield.
* Adjacent daughters: the span covers a contiguous proper subsequence
  of one node's daughters.  A new node labeled with the tag is
  inserted to dominate exactly those daughters.
* Already tagged: a previous semantic suffix is overlaid by the new
  one; a node never carries two.
* Crossing brackets: the span straddles constituents; the tree is left
  alone.

Annotations are processed family by family (named entities before
modality/negation by default) and within a family in ascending
precedence, so the highest-precedence tag lands last and wins
conflicts.  A word tagged as both trigger and target keeps the target
tag regardless of arrival order.

After grafting, a Negation trigger adjacent to a modality trigger in
the same minimal clause composes NOT into that modality's target
labels; leftover raw Negation targets on words that carry other tags
are removed as uncomposable nested modality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .tags import MNTag, Modality, Role, compose_negation, parse_tag, specificity_rank
from .taggers import MN_FAMILY, NE_FAMILY, StandoffAnnotation
from .trees import ParseTree, Span, base_category

OUTCOMES = (
    "grafted-exact",
    "grafted-inserted",
    "overlaid",
    "crossing-skipped",
    "composed",
    "dropped-uncomposable",
)


@dataclass(frozen=True)
class GraftConfig:
    family_order: tuple[str, ...] = (NE_FAMILY, MN_FAMILY)
    target_over_trigger: bool = True


@dataclass
class GraftReport:
    counts: dict[str, int] = field(default_factory=lambda: {k: 0 for k in OUTCOMES})

    def bump(self, outcome: str) -> None:
        self.counts[outcome] += 1

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def merge(self, other: "GraftReport") -> None:
        for k, v in other.counts.items():
            self.counts[k] += v

    def format(self) -> str:
        return "".join(f"{k}: {self.counts[k]}\n" for k in OUTCOMES)


class SpanCase(Enum):
    EXACT = "Exact"
    ADJACENT_DAUGHTERS = "AdjacentDaughters"
    CROSSING = "Crossing"


def classify_span(tree: ParseTree, span: Span) -> tuple[SpanCase, ParseTree | None]:
    """Classify a span; for Exact the topmost same-span node is returned."""
    from .trees import node_spans

    spans = node_spans(tree)
    total = spans[0][1].end
    if span.end > total:
        raise ValueError(f"span {span} outside sentence of {total} tokens")
    same = [n for n, s in spans if s == span]
    if same:
        return SpanCase.EXACT, same[0]  # preorder, so topmost first
    by_id = {id(n): s for n, s in spans}
    for n, _ in spans:
        kids = n.children
        for i, kid in enumerate(kids):
            if by_id[id(kid)].start != span.start:
                continue
            j = i
            while j < len(kids) and by_id[id(kids[j])].end < span.end:
                j += 1
            if j < len(kids) and by_id[id(kids[j])].end == span.end and (j - i + 1) < len(kids):
                return SpanCase.ADJACENT_DAUGHTERS, None
    return SpanCase.CROSSING, None


class _GNode:
    __slots__ = (
        "label",
        "token",
        "children",
        "parent",
        "start",
        "end",
        "applied",
        "inserted",
    )

    def __init__(self, label, token, children, start, end, inserted=False):
        self.label = label
        self.token = token
        self.children = children
        self.parent = None
        self.start = start
        self.end = end
        self.applied = []  # list of [label, family, role, seq, alive]
        self.inserted = inserted
        for c in children:
            c.parent = self

    @property
    def span(self) -> Span:
        return Span(self.start, self.end)

    def alive_applied(self):
        return [e for e in self.applied if e[4]]


class _Shadow:
    """Mutable working copy of a tree with live span bookkeeping."""

    def __init__(self, tree: ParseTree):
        def build(node: ParseTree, start: int) -> tuple[_GNode, int]:
            if node.is_leaf:
                return _GNode(node.label, node.token, [], start, start + 1), start + 1
            children = []
            pos = start
            for c in node.children:
                g, pos = build(c, pos)
                children.append(g)
            return _GNode(node.label, None, children, start, pos), pos

        self.root, self.size = build(tree, 0)

    def nodes(self):
        stack = [self.root]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))

    def same_span_chain(self, span: Span) -> list[_GNode]:
        """Nodes whose span equals ``span``, topmost first."""
        return [n for n in self.nodes() if n.start == span.start and n.end == span.end]

    def adjacent_daughters(self, span: Span):
        for n in self.nodes():
            kids = n.children
            for i, kid in enumerate(kids):
                if kid.start != span.start:
                    continue
                j = i
                while j < len(kids) and kids[j].end < span.end:
                    j += 1
                if j < len(kids) and kids[j].end == span.end and (j - i + 1) < len(kids):
                    return n, i, j
        return None

    def insert(self, parent: _GNode, i: int, j: int, label: str) -> _GNode:
        grabbed = parent.children[i : j + 1]
        new = _GNode(label, None, list(grabbed), grabbed[0].start, grabbed[-1].end, inserted=True)
        parent.children[i : j + 1] = [new]
        new.parent = parent
        return new

    def minimal_clause(self, span: Span) -> Span:
        best = None
        for n in self.nodes():
            if base_category(n.label) == "S" and n.span.covers(span):
                if best is None or (n.end - n.start) < (best.end - best.start):
                    best = n.span
        return best if best is not None else self.root.span


def _mn_tag(label: str) -> MNTag | None:
    try:
        return parse_tag(label)
    except Exception:
        return None


def _apply_key(a: StandoffAnnotation) -> tuple:
    # Lower precedence first, so higher precedence overwrites.
    tag = _mn_tag(a.label) if a.family == MN_FAMILY else None
    rank = specificity_rank(tag) if tag is not None else 0
    return (-rank, a.span.start, a.span.end, a.label)


@dataclass
class _Grafted:
    annotation: StandoffAnnotation
    outcome: str
    nodes: list[_GNode]
    entries: list[list]  # applied entries, shared with the nodes
    label: str


def graft(
    tree: ParseTree,
    annotations: Sequence[StandoffAnnotation],
    config: GraftConfig | None = None,
) -> tuple[ParseTree, GraftReport]:
    """Merge annotations into the tree; see the module docstring.

    The result is independent of the input annotation order.
    """
    config = config or GraftConfig()
    shadow = _Shadow(tree)
    report = GraftReport()

    for a in annotations:
        if a.span.end > shadow.size:
            raise ValueError(f"annotation span {a.span} outside sentence of {shadow.size} tokens")
        if a.family not in config.family_order:
            raise ValueError(f"annotation family {a.family!r} not in family order")

    grafted: list[_Grafted] = []
    seq = 0
    for family in config.family_order:
        batch = sorted((a for a in annotations if a.family == family), key=_apply_key)
        for a in batch:
            chain = shadow.same_span_chain(a.span)
            if chain:
                overlaid = any(n.alive_applied() for n in chain)
                entries = []
                for n in chain:
                    role = getattr(_mn_tag(a.label), "role", None)
                    entry = [a.label, a.family, role, seq, True]
                    n.applied.append(entry)
                    entries.append(entry)
                grafted.append(
                    _Grafted(a, "overlaid" if overlaid else "grafted-exact", chain, entries, a.label)
                )
            else:
                where = shadow.adjacent_daughters(a.span)
                if where is None:
                    grafted.append(_Grafted(a, "crossing-skipped", [], [], a.label))
                    seq += 1
                    continue
                parent, i, j = where
                new = shadow.insert(parent, i, j, a.label)
                role = getattr(_mn_tag(a.label), "role", None)
                entry = [a.label, a.family, role, seq, True]
                new.applied.append(entry)
                grafted.append(_Grafted(a, "grafted-inserted", [new], [entry], a.label))
            seq += 1

    _compose(shadow, grafted)

    for g in grafted:
        report.bump(g.outcome)

    final = _render(shadow, config)
    return final, report


def _compose(shadow: _Shadow, grafted: list[_Grafted]) -> None:
    mn = [g for g in grafted if g.annotation.family == MN_FAMILY and _mn_tag(g.label)]
    triggers = [
        g
        for g in mn
        if (t := _mn_tag(g.label)).role is Role.TRIGGER and t.modality is not Modality.NEGATION
    ]
    negations = [
        g
        for g in mn
        if (t := _mn_tag(g.label)).role is Role.TRIGGER and t.modality is Modality.NEGATION
    ]
    negations.sort(key=lambda g: g.annotation.span.start)

    for neg in negations:
        nspan = neg.annotation.span
        clause = shadow.minimal_clause(nspan)
        adjacent = [
            t
            for t in triggers
            if clause.covers(t.annotation.span)
            and (
                t.annotation.span.end == nspan.start
                or nspan.end == t.annotation.span.start
                or _siblings(t, neg)
            )
        ]
        if not adjacent:
            continue
        # Prefer the trigger just before the negation (a modal), else after.
        adjacent.sort(
            key=lambda t: (t.annotation.span.end != nspan.start, t.annotation.span.start)
        )
        trig_tag = _mn_tag(adjacent[0].label)
        rewrote = False
        for g in mn:
            tag = _mn_tag(g.label)
            if (
                tag.role is Role.TARGET
                and tag.modality is trig_tag.modality
                and not tag.outer_not
                and clause.covers(g.annotation.span)
            ):
                new_label = str(compose_negation(tag, True))
                g.label = new_label
                for entry in g.entries:
                    entry[0] = new_label
                rewrote = True
        if rewrote:
            neg.outcome = "composed"

    # Raw Negation targets left on words that carry other tags are
    # uncomposable nested modality; remove them.
    for g in mn:
        tag = _mn_tag(g.label)
        if tag.role is Role.TARGET and tag.modality is Modality.NEGATION:
            own = {id(e) for e in g.entries}
            nested = any(
                id(other) not in own for node in g.nodes for other in node.alive_applied()
            )
            if nested and g.nodes:
                for entry in g.entries:
                    entry[4] = False
                g.outcome = "dropped-uncomposable"


def _siblings(a: _Grafted, b: _Grafted) -> bool:
    return any(
        na.parent is not None and na.parent is nb.parent for na in a.nodes for nb in b.nodes
    )


def _render(shadow: _Shadow, config: GraftConfig) -> ParseTree:
    def final_label(n: _GNode) -> str | None:
        alive = n.alive_applied()
        if not alive:
            return None
        chosen = max(alive, key=lambda e: e[3])
        # Trigger-vs-target conflicts are adjudicated within the MN
        # family only; a later family's tag stands.
        if config.target_over_trigger and chosen[2] is Role.TRIGGER:
            targets = [e for e in alive if e[2] is Role.TARGET]
            if targets:
                chosen = max(targets, key=lambda e: e[3])
        return chosen[0]

    def walk(n: _GNode) -> ParseTree:
        tag = final_label(n)
        if n.inserted:
            label = tag if tag is not None else n.label
        else:
            label = n.label + ("-" + tag if tag is not None else "")
        if not n.children:
            return ParseTree(label, (), n.token)
        kids = tuple(walk(c) for c in n.children)
        if n.inserted and len(kids) == 1 and tag is None:
            # An inserted node whose tag was dropped would be an empty
            # shell; keep it with its original label for traceability.
            label = n.label
        return ParseTree(label, kids, None)

    return walk(shadow.root)
