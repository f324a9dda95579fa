"""Trigger lexicon: records, file format, and token-sequence lookup.

The on-disk format is one record per blank-line-separated block of
``Key: Value`` lines, mirroring the published entry layout::

    String: need
    Pos: VB
    Modality: Require
    Trigger: need
    Subcat: V3-passive-basic -- More citizens are needed to vote.

``Subcat`` repeats; the part after `` -- `` is an illustrative gloss.
Unknown keys are preserved verbatim.  Lines starting with ``#`` are
comments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .tags import Modality, TagError


class LexiconError(ValueError):
    pass


_MODALITY_BY_NAME = {m.value: m for m in Modality}
_MODALITY_BY_NAME["FirmBelief"] = Modality.FIRM_BELIEF


@dataclass(frozen=True)
class LexiconEntry:
    surface: str
    pos: tuple[str, ...]
    modality: Modality
    head: str
    subcats: tuple[str, ...] = ()
    glosses: tuple[str, ...] = ()
    extras: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        words = self.words
        if len(self.pos) != len(words):
            raise LexiconError(
                f"entry {self.surface!r}: {len(words)} words but {len(self.pos)} POS tags"
            )
        if self.head.lower() not in [w.lower() for w in words]:
            raise LexiconError(f"entry {self.surface!r}: head {self.head!r} not in surface")
        if (self.pos[0].startswith("VB") or self.pos[0] == "MD") and not self.subcats:
            raise LexiconError(f"verbal entry {self.surface!r} has no subcategorization codes")

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(self.surface.split())

    def extra(self, key: str) -> str | None:
        for k, v in self.extras:
            if k == key:
                return v
        return None


@dataclass(frozen=True)
class Lexicon:
    entries: tuple[LexiconEntry, ...]
    _index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        seen = set()
        for e in self.entries:
            key = (e.surface.lower(), e.pos, e.modality)
            if key in seen:
                raise LexiconError(f"duplicate entry {e.surface!r}/{'+'.join(e.pos)}")
            seen.add(key)
            self._index.setdefault(e.words[0].lower(), []).append(e)

    def candidates(self, first_word: str) -> list[LexiconEntry]:
        return self._index.get(first_word.lower(), [])


def _pos_matches(token_pos: str, entry_pos: str) -> bool:
    # Entry tags are base categories: VB covers VBD/VBZ/..., MD is exact.
    return token_pos == entry_pos or token_pos.startswith(entry_pos)


def lookup(
    lexicon: Lexicon, tagged: Sequence[tuple[str, str]], position: int
) -> list[tuple[LexiconEntry, tuple[int, int]]]:
    """All entries matching at ``position``, longest match first.

    ``tagged`` is a (token, POS) sequence.  Words compare
    case-insensitively, POS tags at base-category granularity.
    """
    if not 0 <= position < len(tagged):
        raise IndexError(f"position {position} outside sequence of {len(tagged)}")
    hits: list[tuple[LexiconEntry, tuple[int, int]]] = []
    for entry in lexicon.candidates(tagged[position][0]):
        end = position + len(entry.words)
        if end > len(tagged):
            continue
        window = tagged[position:end]
        if all(
            tok.lower() == w.lower() and _pos_matches(pos, p)
            for (tok, pos), w, p in zip(window, entry.words, entry.pos)
        ):
            hits.append((entry, (position, end)))
    hits.sort(key=lambda h: -(h[1][1] - h[1][0]))
    return hits


def _finish_record(fields: list[tuple[str, str]], ordinal: int) -> LexiconEntry:
    surface = pos = modality_name = head = None
    subcats: list[str] = []
    glosses: list[str] = []
    extras: list[tuple[str, str]] = []
    for key, value in fields:
        if key == "String":
            surface = value
        elif key == "Pos":
            pos = value
        elif key == "Modality":
            modality_name = value
        elif key == "Trigger":
            head = value
        elif key == "Subcat":
            code, _, gloss = value.partition(" -- ")
            subcats.append(code.strip())
            glosses.append(gloss.strip())
        else:
            extras.append((key, value))
    if surface is None:
        raise LexiconError(f"record {ordinal}: missing String")
    if modality_name is None:
        raise LexiconError(f"record {ordinal}: missing Modality ({surface!r})")
    try:
        modality = _MODALITY_BY_NAME[modality_name]
    except KeyError:
        raise LexiconError(f"record {ordinal}: unknown modality {modality_name!r}") from None
    if pos is None:
        raise LexiconError(f"record {ordinal}: missing Pos ({surface!r})")
    return LexiconEntry(
        surface=surface,
        pos=tuple(pos.split()),
        modality=modality,
        head=head if head is not None else surface.split()[0],
        subcats=tuple(subcats),
        glosses=tuple(glosses),
        extras=tuple(extras),
    )


def load_lexicon(text: str) -> Lexicon:
    entries: list[LexiconEntry] = []
    fields: list[tuple[str, str]] = []
    ordinal = 0
    for raw in text.splitlines() + [""]:
        line = raw.rstrip()
        if line.startswith("#"):
            continue
        if not line:
            if fields:
                ordinal += 1
                entries.append(_finish_record(fields, ordinal))
                fields = []
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise LexiconError(f"not a 'Key: Value' line: {line!r}")
        fields.append((key.strip(), value.strip()))
    return Lexicon(tuple(entries))


def dump_lexicon(lexicon: Lexicon) -> str:
    blocks = []
    for e in lexicon.entries:
        lines = [
            f"String: {e.surface}",
            f"Pos: {' '.join(e.pos)}",
            f"Modality: {e.modality.value}",
            f"Trigger: {e.head}",
        ]
        for code, gloss in zip(e.subcats, e.glosses):
            lines.append(f"Subcat: {code} -- {gloss}" if gloss else f"Subcat: {code}")
        for k, v in e.extras:
            lines.append(f"{k}: {v}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


def load_lexicon_file(path) -> Lexicon:
    with open(path, encoding="utf-8") as fh:
        return load_lexicon(fh.read())


# TagError is re-exported so callers catching lexicon problems also see
# bad modality names raised during tag construction.
__all__ = [
    "Lexicon",
    "LexiconEntry",
    "LexiconError",
    "TagError",
    "dump_lexicon",
    "load_lexicon",
    "load_lexicon_file",
    "lookup",
]
