"""Tree pattern matching and rewriting.

Patterns pair a node test with relation clauses::

    VB=trigger !< /^Trig/ < VoicePassive < required $.. (S < (VB=target !< AUX))

* A node test is an atom, an alternation ``NP|ADJP``, or an anchored
  prefix regex ``/^Trig/``; ``=name`` captures the matched node.
* ``<`` requires an immediate daughter satisfying the operand.  An atom
  operand matches a daughter by label or by token, and a childless
  preterminal also satisfies a plain atom naming its own token (the
  node dominates that word).
* ``!<`` is the negation of ``<``; captures are not allowed inside.
* ``$..`` requires a following sister.
* Operands may be parenthesized sub-patterns.

Actions follow the pattern, one per line::

    insert (TargReq) >2 target      # payload becomes the 2nd daughter
    augment target TargReq          # append "-TargReq" to the label

``apply`` rewrites to fixpoint, recomputing matches after every change
and charging each change against a rewrite budget, so a rule that keeps
re-enabling itself is reported instead of looping forever.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator

from .trees import ParseTree, iter_nodes

_LEX = re.compile(r"!<|\$\.\.|[()]|/\^[^/\s]*/(?:=\w+)?|<|[^()<>\s]+")


class PatternSyntaxError(ValueError):
    """Bad rule source; ``column`` points into the pattern text."""

    def __init__(self, message: str, column: int | None = None):
        if column is not None:
            message = f"{message} (column {column})"
        super().__init__(message)
        self.column = column


class RewriteBudgetError(RuntimeError):
    """A rule kept rewriting past its budget; it likely re-enables itself."""


class Relation(Enum):
    CHILD = "<"
    NOT_CHILD = "!<"
    FOLLOWING_SISTER = "$.."


@dataclass(frozen=True)
class NodeTest:
    alternatives: tuple[str, ...] | None = None
    regex: str | None = None

    def matches(self, node: ParseTree) -> bool:
        if self.regex is not None:
            return _compiled(self.regex).match(node.label) is not None
        assert self.alternatives is not None
        return any(node.label == a or node.token == a for a in self.alternatives)

    def __str__(self) -> str:
        if self.regex is not None:
            return f"/{self.regex}/"
        return "|".join(self.alternatives or ())


_REGEX_CACHE: dict[str, re.Pattern] = {}


def _compiled(src: str) -> re.Pattern:
    if src not in _REGEX_CACHE:
        _REGEX_CACHE[src] = re.compile(src)
    return _REGEX_CACHE[src]


@dataclass(frozen=True)
class Pattern:
    test: NodeTest
    capture: str | None = None
    clauses: tuple["Clause", ...] = ()

    def capture_names(self) -> list[str]:
        names = [self.capture] if self.capture else []
        for clause in self.clauses:
            names.extend(clause.operand.capture_names())
        return names

    def is_plain_atom(self) -> bool:
        """Capture-less, clause-less atom test (alternations included)."""
        return self.capture is None and not self.clauses and self.test.alternatives is not None


@dataclass(frozen=True)
class Clause:
    relation: Relation
    operand: Pattern


class ActionKind(Enum):
    INSERT = "insert"
    AUGMENT = "augment"


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    capture: str
    payload: ParseTree | None = None  # insert
    position: int | None = None  # insert, 1-based
    label: str | None = None  # augment


@dataclass(frozen=True)
class PatternRule:
    name: str
    pattern: Pattern
    actions: tuple[Action, ...]
    source: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        names = self.pattern.capture_names()
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise PatternSyntaxError(f"duplicate capture names {sorted(dupes)}")
        bound = set(names)
        for action in self.actions:
            if action.capture not in bound:
                raise PatternSyntaxError(f"action references unbound capture {action.capture!r}")


# ---------------------------------------------------------------------------
# Parsing


class _Tokens:
    def __init__(self, text: str):
        self.items = [(m.group(), m.start()) for m in _LEX.finditer(text)]
        self.pos = 0

    def peek(self) -> tuple[str, int] | None:
        return self.items[self.pos] if self.pos < len(self.items) else None

    def next(self) -> tuple[str, int]:
        item = self.peek()
        if item is None:
            raise PatternSyntaxError("unexpected end of pattern")
        self.pos += 1
        return item


def _parse_test(token: str, column: int) -> tuple[NodeTest, str | None]:
    if token.startswith("/"):
        body, _, capture = token.rpartition("/")
        body = body[1:]
        name = capture[1:] if capture.startswith("=") else None
        if not body.startswith("^"):
            raise PatternSyntaxError(f"only anchored prefix regexes are supported: /{body}/", column)
        try:
            _compiled(body)
        except re.error as exc:
            raise PatternSyntaxError(f"bad regex /{body}/: {exc}", column) from None
        return NodeTest(regex=body), name
    name = None
    if "=" in token:
        token, _, name = token.rpartition("=")
        if not name.isidentifier():
            raise PatternSyntaxError(f"bad capture name {name!r}", column)
    alts = tuple(token.split("|"))
    if not all(alts):
        raise PatternSyntaxError(f"bad label test {token!r}", column)
    return NodeTest(alternatives=alts), name


def _parse_operand(toks: _Tokens) -> Pattern:
    token, column = toks.next()
    if token == "(":
        inner = _parse_pattern_expr(toks, in_group=True)
        closing, ccol = toks.next()
        if closing != ")":
            raise PatternSyntaxError("expected ')'", ccol)
        return inner
    if token in (")", "<", "!<", "$.."):
        raise PatternSyntaxError(f"expected a node test, got {token!r}", column)
    test, name = _parse_test(token, column)
    return Pattern(test, name)


def _parse_pattern_expr(toks: _Tokens, in_group: bool = False) -> Pattern:
    head = _parse_operand(toks)
    clauses = list(head.clauses)
    while True:
        item = toks.peek()
        if item is None or item[0] == ")":
            break
        token, column = item
        relation = {r.value: r for r in Relation}.get(token)
        if relation is None:
            # Inside parentheses a bare operand is shorthand for
            # immediate dominance: "(DT the)" means DT < the.
            if in_group:
                relation = Relation.CHILD
            else:
                toks.next()
                raise PatternSyntaxError(f"expected a relation operator, got {token!r}", column)
        else:
            toks.next()
        operand = _parse_operand(toks)
        if relation is Relation.NOT_CHILD and operand.capture_names():
            raise PatternSyntaxError("captures are not allowed under !<", column)
        clauses.append(Clause(relation, operand))
    return Pattern(head.test, head.capture, tuple(clauses))


def _parse_pattern_text(text: str) -> Pattern:
    toks = _Tokens(text)
    pattern = _parse_pattern_expr(toks)
    extra = toks.peek()
    if extra is not None:
        raise PatternSyntaxError(f"trailing {extra[0]!r}", extra[1])
    return pattern


_INSERT_RE = re.compile(r"insert\s+\((\S+)\)\s+>(\d+)\s+(\w+)\s*$")
_AUGMENT_RE = re.compile(r"augment\s+(\w+)\s+(\S+)\s*$")


def _parse_action(line: str) -> Action:
    m = _INSERT_RE.match(line)
    if m:
        payload_label, position, capture = m.group(1), int(m.group(2)), m.group(3)
        if position < 1:
            raise PatternSyntaxError(f"insert position must be >= 1: {line!r}")
        payload = ParseTree(payload_label, (), payload_label)
        return Action(ActionKind.INSERT, capture, payload=payload, position=position)
    m = _AUGMENT_RE.match(line)
    if m:
        return Action(ActionKind.AUGMENT, m.group(1), label=m.group(2))
    raise PatternSyntaxError(f"unparseable action line {line!r}")


def parse_pattern(src: str, name: str = "rule") -> PatternRule:
    """Parse one rule record: optional ``rule NAME`` header, pattern
    line(s), then action lines."""
    pattern_parts: list[str] = []
    actions: list[Action] = []
    for raw in src.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("rule ") and not pattern_parts and not actions:
            name = line[5:].strip()
        elif line.startswith(("insert ", "augment ")):
            actions.append(_parse_action(line))
        elif actions:
            raise PatternSyntaxError(f"pattern text after actions: {line!r}")
        else:
            pattern_parts.append(line)
    if not pattern_parts:
        raise PatternSyntaxError("rule has no pattern")
    pattern = _parse_pattern_text(" ".join(pattern_parts))
    return PatternRule(name, pattern, tuple(actions), source=src.strip())


def parse_rules(text: str) -> list[PatternRule]:
    """Parse a rule file: blank-line-separated records, ``#`` comments."""
    rules = []
    block: list[str] = []
    for raw in text.splitlines() + [""]:
        line = raw.rstrip()
        if line.startswith("#"):
            continue
        if not line.strip():
            if block:
                rules.append(parse_pattern("\n".join(block), name=f"rule{len(rules) + 1}"))
                block = []
        else:
            block.append(line)
    return rules


def serialize_rules(rules) -> str:
    return "\n\n".join(r.source for r in rules) + "\n"


# ---------------------------------------------------------------------------
# Matching


class Match:
    """One binding environment: the root-test node plus named captures."""

    def __init__(self, root: ParseTree, captures: dict[str, ParseTree]):
        self.root = root
        self.captures = captures

    def __repr__(self) -> str:
        names = ", ".join(f"{k}={v.label}" for k, v in self.captures.items())
        return f"Match({self.root.label}; {names})"


class _Index:
    def __init__(self, tree: ParseTree):
        self.parent: dict[int, ParseTree] = {}
        self.child_pos: dict[int, int] = {}
        for n in iter_nodes(tree):
            for i, c in enumerate(n.children):
                if id(c) in self.parent:
                    raise ValueError("tree shares node objects; rebuild it first")
                self.parent[id(c)] = n
                self.child_pos[id(c)] = i

    def following_sisters(self, node: ParseTree) -> tuple[ParseTree, ...]:
        parent = self.parent.get(id(node))
        if parent is None:
            return ()
        return parent.children[self.child_pos[id(node)] + 1 :]


def _atom_self_token(operand: Pattern, node: ParseTree) -> bool:
    return (
        operand.is_plain_atom()
        and node.is_leaf
        and node.token in operand.test.alternatives  # type: ignore[operator]
    )


def _solve(pattern: Pattern, node: ParseTree, index: _Index) -> Iterator[dict]:
    if not pattern.test.matches(node):
        return
    env = {pattern.capture: node} if pattern.capture else {}
    yield from _solve_clauses(pattern.clauses, 0, node, env, index)


def _child_satisfiable(operand: Pattern, node: ParseTree, index: _Index) -> bool:
    if _atom_self_token(operand, node):
        return True
    return any(_first(_solve(operand, child, index)) for child in node.children)


def _first(it: Iterator) -> bool:
    for _ in it:
        return True
    return False


def _solve_clauses(
    clauses: tuple[Clause, ...], i: int, node: ParseTree, env: dict, index: _Index
) -> Iterator[dict]:
    if i == len(clauses):
        yield env
        return
    clause = clauses[i]
    if clause.relation is Relation.NOT_CHILD:
        if not _child_satisfiable(clause.operand, node, index):
            yield from _solve_clauses(clauses, i + 1, node, env, index)
        return
    if clause.relation is Relation.CHILD:
        if _atom_self_token(clause.operand, node):
            yield from _solve_clauses(clauses, i + 1, node, env, index)
            return
        candidates = node.children
    else:
        candidates = index.following_sisters(node)
    for candidate in candidates:
        for sub in _solve(clause.operand, candidate, index):
            merged = env | sub
            yield from _solve_clauses(clauses, i + 1, node, merged, index)


def match(rule: PatternRule, tree: ParseTree) -> list[Match]:
    """All distinct binding environments, in document order of the node
    matching the pattern's root test."""
    index = _Index(tree)
    seen: set[tuple] = set()
    out: list[Match] = []
    for node in iter_nodes(tree):
        for env in _solve(rule.pattern, node, index):
            key = (id(node), tuple(sorted((k, id(v)) for k, v in env.items())))
            if key not in seen:
                seen.add(key)
                out.append(Match(node, env))
    return out


# ---------------------------------------------------------------------------
# Rewriting


def _clone(tree: ParseTree) -> ParseTree:
    if tree.is_leaf:
        return ParseTree(tree.label, (), tree.token)
    return ParseTree(tree.label, tuple(_clone(c) for c in tree.children), None)


def _path_of(tree: ParseTree, target: ParseTree) -> tuple[int, ...]:
    def walk(n: ParseTree, path: tuple[int, ...]):
        if n is target:
            return path
        for i, c in enumerate(n.children):
            found = walk(c, path + (i,))
            if found is not None:
                return found
        return None

    path = walk(tree, ())
    if path is None:
        raise ValueError("captured node is not in the tree")
    return path


def _node_at(tree: ParseTree, path: tuple[int, ...]) -> ParseTree:
    for i in path:
        tree = tree.children[i]
    return tree


def _replace_at(tree: ParseTree, path: tuple[int, ...], new: ParseTree) -> ParseTree:
    if not path:
        return new
    i = path[0]
    children = list(tree.children)
    children[i] = _replace_at(children[i], path[1:], new)
    return ParseTree(tree.label, tuple(children), None)


def has_label_segment(label: str, segment: str) -> bool:
    return segment in label.split("-")


def _apply_one(node: ParseTree, action: Action) -> tuple[ParseTree, bool, int | None]:
    """Returns (new node, changed, 0-based insert index or None)."""
    if action.kind is ActionKind.AUGMENT:
        assert action.label is not None
        if has_label_segment(node.label, action.label):
            return node, False, None
        return ParseTree(node.label + "-" + action.label, node.children, node.token), True, None
    assert action.payload is not None and action.position is not None
    children = list(node.children)
    if node.is_leaf:
        # The word becomes a bare word leaf so markers can sit beside it.
        children = [ParseTree(node.token, (), node.token)]  # type: ignore[arg-type]
    idx = min(action.position - 1, len(children))
    children.insert(idx, _clone(action.payload))
    return ParseTree(node.label, tuple(children), None), True, idx


def _apply_actions(
    tree: ParseTree, m: Match, actions: tuple[Action, ...]
) -> tuple[ParseTree, bool]:
    paths = {name: _path_of(tree, node) for name, node in m.captures.items()}
    changed = False
    for action in actions:
        path = paths[action.capture]
        node = _node_at(tree, path)
        new_node, did, insert_idx = _apply_one(node, action)
        if not did:
            continue
        changed = True
        tree = _replace_at(tree, path, new_node)
        if insert_idx is not None:
            # Keep sibling paths of pending captures valid under the insert.
            for other, opath in paths.items():
                if other == action.capture or len(opath) <= len(path):
                    continue
                if opath[: len(path)] == path and opath[len(path)] >= insert_idx:
                    paths[other] = path + (opath[len(path)] + 1,) + opath[len(path) + 1 :]
    return tree, changed


def apply(
    rule: PatternRule,
    tree: ParseTree,
    max_rewrites: int = 100,
    on_rewrite: Callable[[Match, ParseTree], None] | None = None,
) -> ParseTree:
    """Apply a rule to fixpoint: rewrite the first match that changes
    the tree, recompute matches, repeat.

    ``on_rewrite`` is called with the match and the tree it was found in
    just before each change.  Raises RewriteBudgetError after
    ``max_rewrites`` changes.
    """
    rewrites = 0
    while True:
        progressed = False
        for m in match(rule, tree):
            new_tree, changed = _apply_actions(tree, m, rule.actions)
            if changed:
                if rewrites >= max_rewrites:
                    raise RewriteBudgetError(
                        f"rule {rule.name!r} exceeded its rewrite budget of {max_rewrites}"
                    )
                rewrites += 1
                if on_rewrite is not None:
                    on_rewrite(m, tree)
                tree = new_tree
                progressed = True
                break
        if not progressed:
            return tree
