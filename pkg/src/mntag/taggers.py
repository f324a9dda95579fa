"""String-based and structure-based modality/negation taggers.

Both taggers mark lexicon triggers and the targets their modalities
scope over, emitting standoff annotations addressed by token span.

The string tagger works on (token, POS) sequences: a trigger's target
is the next non-auxiliary verb to its right, and a negation trigger
sitting between a trigger and that target folds NOT into the target's
tag.

The structure tagger applies generated pattern rules to flattened,
preprocessed parse trees, then runs a negation-composition pass:

* a negation between a trigger and its target composes NOT into the
  target tag unless the target word is itself a trigger (nested
  modality, left for tree grafting to resolve);
* a negation immediately before a trigger scopes over that trigger's
  modality and composes NOT into its target's tag, with the same
  nested-modality exemption;
* otherwise the negation keeps its own raw Negation target.

Finally the marker daughters inserted by the rules are folded into
``-`` label suffixes and the preprocessing markers are dropped, so the
output tree carries the input's word yield plus tag suffixes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import matcher, rulegen
from .lexicon import Lexicon, lookup
from .tags import MNTag, Modality, Role, TagError, compose_negation, parse_tag, specificity_rank
from .trees import ParseTree, Span

MN_FAMILY = "MN"
NE_FAMILY = "NE"

_SKIP_POS = frozenset(["RB", "RBR", "RBS", "TO"])


@dataclass(frozen=True)
class TaggedToken:
    token: str
    pos: str
    tags: frozenset[MNTag] = frozenset()


@dataclass(frozen=True)
class StandoffAnnotation:
    """One tag over a token span, decoupled from any tree."""

    sentence: int
    span: Span
    label: str
    family: str = MN_FAMILY

    def sort_key(self):
        return (self.sentence, self.span.start, self.span.end, self.family, self.label)


def format_standoff(annotations: Iterable[StandoffAnnotation]) -> str:
    lines = [
        f"{a.sentence}\t{a.span.start}\t{a.span.end}\t{a.label}\t{a.family}"
        for a in sorted(annotations, key=StandoffAnnotation.sort_key)
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_standoff(text: str) -> list[StandoffAnnotation]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise ValueError(f"standoff line {lineno}: expected 5 tab-separated fields")
        sentence, start, end, label, family = parts
        out.append(
            StandoffAnnotation(int(sentence), Span(int(start), int(end)), label, family)
        )
    return out


def read_token_tsv(text: str) -> list[list[tuple[str, str]]]:
    """Sentences of (token, POS) pairs; blank lines separate sentences."""
    sentences: list[list[tuple[str, str]]] = []
    current: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines() + [""], 1):
        line = raw.rstrip()
        if not line:
            if current:
                sentences.append(current)
                current = []
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"token line {lineno}: expected 'token<TAB>POS'")
        current.append((parts[0], parts[1]))
    return sentences


def format_token_tsv(sentences: Iterable[Sequence[TaggedToken]]) -> str:
    blocks = []
    for sent in sentences:
        lines = []
        for t in sent:
            tag_text = ",".join(sorted(str(tag) for tag in t.tags))
            lines.append(f"{t.token}\t{t.pos}\t{tag_text}" if t.tags else f"{t.token}\t{t.pos}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


def is_auxiliary_token(tagged: Sequence[tuple[str, str]], i: int) -> bool:
    """Token-level auxiliary test shared with the rule generator's lists.

    Modals are always auxiliary.  A form of be/have/do is auxiliary when
    the next token (skipping adverbs and ``to``) is verbal.
    """
    token, pos = tagged[i]
    if pos == "MD":
        return True
    if token.lower() not in rulegen.AUX_CANDIDATE_WORDS:
        return False
    for next_token, next_pos in tagged[i + 1 :]:
        if next_pos in _SKIP_POS:
            continue
        return next_pos in rulegen.VERBAL_POS
    return False


def _next_verb(tagged: Sequence[tuple[str, str]], start: int) -> int | None:
    for j in range(start, len(tagged)):
        pos = tagged[j][1]
        if pos in rulegen.VERBAL_POS and not is_auxiliary_token(tagged, j):
            return j
    return None


@dataclass
class _RawAnn:
    span: Span
    tag: MNTag
    link: int  # index of the rule application that produced it
    alive: bool = True


@dataclass
class _Link:
    modality: Modality | None
    trigger_span: Span | None
    target_span: Span | None
    trigger_ann: _RawAnn | None = None
    target_ann: _RawAnn | None = None


@dataclass
class TagResult:
    tokens: list[TaggedToken]
    annotations: list[StandoffAnnotation]
    diagnostics: list[str] = field(default_factory=list)


def _compose_pass(
    links: list[_Link],
    diagnostics: list[str],
    nested_exempt: bool,
    scope_over_following: bool,
) -> None:
    """Fold negation links into the modality links they scope over.

    With ``nested_exempt`` set, composition is skipped when the word
    that would receive the rewritten tag is itself a trigger; the raw
    tags stay for downstream composition during grafting.  With
    ``scope_over_following``, a negation immediately before a trigger
    also composes into that trigger's target (structure tagger only;
    the string tagger composes only between a trigger and its target).
    """
    mod_links = [
        l
        for l in links
        if l.modality is not None
        and l.modality is not Modality.NEGATION
        and l.trigger_span is not None
    ]
    trigger_spans = {l.trigger_span for l in mod_links}
    for neg in links:
        if neg.modality is not Modality.NEGATION or neg.trigger_span is None:
            continue
        composed = False
        # Negation between a trigger and that trigger's target.
        straddled = [
            l
            for l in mod_links
            if l.target_span is not None
            and l.trigger_span.end <= neg.trigger_span.start
            and neg.trigger_span.end <= l.target_span.start
        ]
        if straddled:
            link = max(straddled, key=lambda l: l.trigger_span.end)
            if nested_exempt and link.target_span in trigger_spans:
                continue
            if link.target_ann is not None:
                link.target_ann.tag = compose_negation(link.target_ann.tag, True)
            if neg.target_ann is not None and neg.target_ann.span == link.target_span:
                neg.target_ann.alive = False
            composed = True
        elif scope_over_following:
            following = [
                l for l in mod_links if l.trigger_span.start == neg.trigger_span.end
            ]
            if following:
                link = following[0]
                if nested_exempt and link.target_span in trigger_spans:
                    continue
                if link.target_ann is not None:
                    link.target_ann.tag = compose_negation(link.target_ann.tag, True)
                    if (
                        neg.target_ann is not None
                        and neg.target_ann.span == link.trigger_span
                    ):
                        neg.target_ann.alive = False
                    composed = True
        if not composed and neg.target_ann is None:
            diagnostics.append(
                f"negation trigger at {neg.trigger_span.start} has no target"
            )


def _finish_annotations(anns: list[_RawAnn], sentence: int) -> list[StandoffAnnotation]:
    seen = set()
    out = []
    for ann in anns:
        if not ann.alive:
            continue
        key = (ann.span, str(ann.tag))
        if key in seen:
            continue
        seen.add(key)
        out.append(StandoffAnnotation(sentence, ann.span, str(ann.tag), MN_FAMILY))
    out.sort(key=StandoffAnnotation.sort_key)
    return out


# ---------------------------------------------------------------------------
# String tagger


def tag_string(
    tagged: Sequence[tuple[str, str]], lexicon: Lexicon, sentence: int = 0
) -> TagResult:
    """Tag a (token, POS) sequence against the lexicon.

    Triggers are exact word+POS matches; each non-negation trigger's
    target is the next non-auxiliary verb to its right.
    """
    diagnostics: list[str] = []
    links: list[_Link] = []
    anns: list[_RawAnn] = []

    for i in range(len(tagged)):
        for entry, (start, end) in lookup(lexicon, tagged, i):
            span = Span(start, end)
            link = _Link(entry.modality, span, None)
            trig = _RawAnn(span, MNTag(Role.TRIGGER, False, entry.modality, False), len(links))
            link.trigger_ann = trig
            anns.append(trig)
            j = _next_verb(tagged, end)
            if j is not None:
                tspan = Span(j, j + 1)
                link.target_span = tspan
                targ = _RawAnn(
                    tspan, MNTag(Role.TARGET, False, entry.modality, False), len(links)
                )
                link.target_ann = targ
                anns.append(targ)
            elif entry.modality is not Modality.NEGATION:
                diagnostics.append(
                    f"trigger {entry.surface!r} at {start} has no following verb"
                )
            links.append(link)

    _compose_pass(links, diagnostics, nested_exempt=False, scope_over_following=False)
    annotations = _finish_annotations(anns, sentence)

    tag_sets: list[set[MNTag]] = [set() for _ in tagged]
    for a in annotations:
        for k in range(a.span.start, a.span.end):
            tag_sets[k].add(parse_tag(a.label))
    tokens = [
        TaggedToken(tok, pos, frozenset(tag_sets[k]))
        for k, (tok, pos) in enumerate(tagged)
    ]
    return TagResult(tokens, annotations, diagnostics)


# ---------------------------------------------------------------------------
# Structure tagger


@dataclass
class StructureResult:
    tree: ParseTree
    annotations: list[StandoffAnnotation]
    diagnostics: list[str] = field(default_factory=list)
    fired_rules: list[str] = field(default_factory=list)


def tag_structure(
    tree: ParseTree, rules: Sequence[matcher.PatternRule], sentence: int = 0
) -> StructureResult:
    """Apply pattern rules to a flattened, preprocessed tree.

    Returns the suffix-tagged tree (markers folded, word yield
    preserved) plus the standoff annotations.
    """
    diagnostics: list[str] = []
    links: list[_Link] = []
    anns: list[_RawAnn] = []
    fired: list[str] = []
    current = tree

    for rule in rules:
        payloads = {}
        for action in rule.actions:
            if action.kind is matcher.ActionKind.INSERT and action.payload is not None:
                payloads[action.capture] = action.payload.label
            elif action.kind is matcher.ActionKind.AUGMENT and action.label is not None:
                # Augment bakes the suffix in directly; the annotation
                # is still recorded so standoff output stays complete.
                payloads[action.capture] = action.label

        def record(m: matcher.Match, before: ParseTree, rule=rule, payloads=payloads) -> None:
            spans = rulegen.word_spans(before)
            link = _Link(None, None, None)
            link_id = len(links)
            for capture, label in payloads.items():
                node = m.captures.get(capture)
                if node is None or id(node) not in spans:
                    continue
                try:
                    tag = parse_tag(label)
                except TagError:
                    continue  # non-MN payload: lands on the tree only
                ann = _RawAnn(spans[id(node)], tag, link_id)
                anns.append(ann)
                if tag.role is Role.TRIGGER:
                    link.trigger_span = ann.span
                    link.trigger_ann = ann
                    link.modality = tag.modality
                else:
                    link.target_span = ann.span
                    link.target_ann = ann
            if link.modality is None and link.target_ann is not None:
                link.modality = link.target_ann.tag.modality
            if link.trigger_ann is not None or link.target_ann is not None:
                links.append(link)
            fired.append(rule.name)

        current = matcher.apply(rule, current, on_rewrite=record)

    _compose_pass(links, diagnostics, nested_exempt=True, scope_over_following=True)
    annotations = _finish_annotations(anns, sentence)
    folded = fold_markers(current, annotations)
    return StructureResult(folded, annotations, diagnostics, fired)


def fold_markers(
    tree: ParseTree, annotations: Sequence[StandoffAnnotation] | None = None
) -> ParseTree:
    """Replace marker daughters with label suffixes.

    Preprocessing markers (AUX, VoicePassive) are dropped.  A node that
    carried tag markers gains one ``-`` suffix per annotation on its
    word span, in precedence order; with no annotation list given, the
    markers themselves provide the labels.
    """
    by_span: dict[Span, list[str]] = {}
    if annotations is not None:
        for a in annotations:
            by_span.setdefault(a.span, []).append(a.label)
    spans = rulegen.word_spans(tree)

    def suffixes_for(node: ParseTree, marker_labels: list[str]) -> list[str]:
        tag_markers = [l for l in marker_labels if l not in (rulegen.AUX_MARKER, rulegen.PASSIVE_MARKER)]
        if not tag_markers:
            return []
        if annotations is not None:
            labels = by_span.get(spans.get(id(node)), [])  # type: ignore[arg-type]
        else:
            labels = tag_markers
        return sorted(set(labels), key=lambda l: (specificity_rank(parse_tag(l)), l))

    def walk(node: ParseTree) -> ParseTree:
        if node.is_leaf:
            return node
        markers = [c.label for c in node.children if rulegen.is_marker_leaf(c)]
        kept = [walk(c) for c in node.children if not rulegen.is_marker_leaf(c)]
        label = node.label
        for suffix in suffixes_for(node, markers):
            if not matcher.has_label_segment(label, suffix):
                label += "-" + suffix
        if len(kept) == 1 and kept[0].is_leaf and kept[0].label == kept[0].token:
            return ParseTree(label, (), kept[0].token)
        return ParseTree(label, tuple(kept), None)

    return walk(tree)


# ---------------------------------------------------------------------------
# Inline rendering


def _inline_rank(label: str) -> tuple:
    try:
        tag = parse_tag(label)
    except Exception:
        return (999, 0, label)
    return (specificity_rank(tag), 0 if tag.role is Role.TRIGGER else 1, label)


def render_inline(tokens: Sequence[str], annotations: Sequence[StandoffAnnotation]) -> str:
    """Angle-bracket inline form: ``<TrigRequire should>``.

    Same-span tags nest outermost-first by specificity rank; spans are
    assumed non-crossing, as the taggers produce them.
    """
    opens: dict[int, list[StandoffAnnotation]] = {}
    closes: dict[int, int] = {}
    for a in annotations:
        opens.setdefault(a.span.start, []).append(a)
        closes[a.span.end - 1] = closes.get(a.span.end - 1, 0) + 1
    pieces = []
    for i, token in enumerate(tokens):
        prefix = "".join(
            f"<{a.label} "
            for a in sorted(opens.get(i, []), key=lambda a: (-a.span.end, *_inline_rank(a.label)))
        )
        pieces.append(prefix + token + ">" * closes.get(i, 0))
    return " ".join(pieces)


def parse_inline(text: str, sentence: int = 0) -> tuple[list[str], list[StandoffAnnotation]]:
    """Inverse of ``render_inline`` for well-formed inline text."""
    tokens: list[str] = []
    stack: list[tuple[str, int]] = []
    annotations: list[StandoffAnnotation] = []
    for piece in text.split():
        while piece.startswith("<"):
            label, _, rest = piece[1:].partition(" ")
            stack.append((label, len(tokens)))
            piece = rest
            if not piece:
                break
        if not piece:
            continue
        n_close = len(piece) - len(piece.rstrip(">"))
        word = piece[: len(piece) - n_close] if n_close else piece
        tokens.append(word)
        for _ in range(n_close):
            if not stack:
                raise ValueError("unbalanced '>' in inline text")
            label, start = stack.pop()
            annotations.append(
                StandoffAnnotation(sentence, Span(start, len(tokens)), label, MN_FAMILY)
            )
    if stack:
        raise ValueError("unclosed tag in inline text")
    annotations.sort(key=StandoffAnnotation.sort_key)
    return tokens, annotations


# ---------------------------------------------------------------------------
# Agreement


@dataclass(frozen=True)
class LabelScores:
    tp: int
    in_a: int
    in_b: int

    @property
    def precision(self) -> float:
        return self.tp / self.in_a if self.in_a else 0.0

    @property
    def recall(self) -> float:
        return self.tp / self.in_b if self.in_b else 0.0


@dataclass
class AgreementReport:
    overlap_rate: float
    per_label: dict[str, LabelScores]

    def format(self) -> str:
        lines = [f"overlap: {self.overlap_rate:.1f}"]
        for label in sorted(self.per_label):
            s = self.per_label[label]
            lines.append(
                f"{label}\tprecision {s.precision:.3f}\trecall {s.recall:.3f}"
                f"\t({s.tp}/{s.in_a}/{s.in_b})"
            )
        return "\n".join(lines) + "\n"


def agreement(
    a: Sequence[StandoffAnnotation],
    b: Sequence[StandoffAnnotation],
    sentence_count_a: int | None = None,
    sentence_count_b: int | None = None,
) -> AgreementReport:
    """Compare annotation lists, treating ``b`` as the reference.

    The overlap rate is the share of reference sentence-level tag sets
    that ``a`` reproduces; per-label scores use exact span matches.
    """
    count_a = sentence_count_a if sentence_count_a is not None else _count(a)
    count_b = sentence_count_b if sentence_count_b is not None else _count(b)
    if count_a != count_b:
        raise ValueError(f"sentence counts differ: {count_a} vs {count_b}")

    labels_a: dict[int, set[str]] = {}
    labels_b: dict[int, set[str]] = {}
    for ann in a:
        labels_a.setdefault(ann.sentence, set()).add(ann.label)
    for ann in b:
        labels_b.setdefault(ann.sentence, set()).add(ann.label)
    matched = sum(len(labels_a.get(s, set()) & tags) for s, tags in labels_b.items())
    total_b = sum(len(tags) for tags in labels_b.values())
    total_a = sum(len(tags) for tags in labels_a.values())
    if total_b == 0:
        rate = 100.0 if total_a == 0 else 0.0
    else:
        rate = 100.0 * matched / total_b

    set_a = {(x.sentence, x.span.start, x.span.end, x.label) for x in a}
    set_b = {(x.sentence, x.span.start, x.span.end, x.label) for x in b}
    per_label: dict[str, LabelScores] = {}
    for label in {t[3] for t in set_a | set_b}:
        la = {t for t in set_a if t[3] == label}
        lb = {t for t in set_b if t[3] == label}
        per_label[label] = LabelScores(len(la & lb), len(la), len(lb))
    return AgreementReport(rate, per_label)


def _count(annotations: Sequence[StandoffAnnotation]) -> int:
    return max((a.sentence for a in annotations), default=-1) + 1
