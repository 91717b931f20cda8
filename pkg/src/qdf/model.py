"""Typed, immutable representation of a QDF document.

Fields the format marks as required are still typed as optional here: the
parser builds a model from damaged input and leaves the complaints to the
validator.  :func:`check_invariants` enforces the strict contract.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
import re
from typing import Iterator, NamedTuple

from .diagnostics import SourceLocation
from . import dtd

#: default nesting cap for cords, shared by parser and invariant checks
MAX_DEPTH = 64

XML_WHITESPACE = " \t\r\n"


class Direction(str, Enum):
    S = "S"
    Z = "Z"
    U = "U"


class Attach(str, Enum):
    VERSO = "verso"
    RECTO = "recto"
    U = "U"


class CordType(str, Enum):
    PENDANT = "pendant"
    TOP = "top"
    SUBSIDIARY = "subsidiary"
    LOOP = "loop"


class Finish(str, Enum):
    KNOTTED = "knotted"
    BROKEN = "broken"
    NONE = "none"


class KnotKind(str, Enum):
    SINGLE = "single"
    MULTIPLE = "multiple"
    EIGHT = "eight"


class MetricUnit(str, Enum):
    MM = "mm"
    CM = "cm"
    IN = "in"


_INT_RE = re.compile(r"[0-9]+")
_SIGNED_INT_RE = re.compile(r"[+-]?[0-9]+")


def _to_int(text: str, pattern: re.Pattern) -> int | None:
    text = text.strip(XML_WHITESPACE)
    if not pattern.fullmatch(text):
        return None
    try:
        return int(text)
    except ValueError:  # beyond the interpreter's int digit limit
        return None


def parse_count(text: str) -> int | None:
    """Non-negative base-10 integer, or None."""
    return _to_int(text, _INT_RE)


def parse_int(text: str | None) -> int | None:
    return None if text is None else _to_int(text, _SIGNED_INT_RE)


@dataclass(frozen=True)
class Author:
    name: str | None
    institution: str | None = None
    year: str | None = None
    email: str | None = None
    address: str | None = None


@dataclass(frozen=True)
class CatalogHeader:
    source: str | None
    codenames: tuple[str, ...] = ()
    dating: str | None = None
    author: Author | None = None
    comment: str | None = None


@dataclass(frozen=True)
class RgbColor:
    value: str

    @property
    def is_valid(self) -> bool:
        return dtd.is_rgb(self.value)

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class MaterialItem:
    label: str | None
    description: str | None
    color_rgb: RgbColor | None = None
    color_iccnbs: str | None = None
    mixes: tuple[str | None, ...] = ()
    location: SourceLocation | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class MaterialSegment:
    material: str | None
    pos: Decimal | None
    location: SourceLocation | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class AttachRef:
    pendant: str | None
    location: SourceLocation | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Knot:
    """A knot; ``content`` is the element text, digits canonicalized."""

    kind: KnotKind
    pos: Decimal | None
    content: str
    dir: Direction = Direction.U
    location: SourceLocation | None = field(default=None, compare=False, repr=False)

    @property
    def value(self) -> int | None:
        return parse_count(self.content)


@dataclass(frozen=True)
class Cord:
    index: str | None
    lenght: Decimal | None
    pos: Decimal | None
    cord_type: CordType | None
    width: Decimal | None = None
    dir: Direction = Direction.U
    attach: Attach = Attach.U
    attach_through: bool = False
    loop_pos: Decimal | None = None
    finish: Finish | None = None
    attach_pendants: tuple[AttachRef, ...] = ()
    media: tuple[MaterialSegment, ...] = ()
    knots: tuple[Knot, ...] = ()
    children: tuple[Cord, ...] = ()
    transcription: str | None = None
    location: SourceLocation | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class MainCord:
    lenght: Decimal | None
    cords: tuple[Cord, ...] = ()
    index: str | None = None
    width: Decimal | None = None
    dir: Direction = Direction.U
    material: str | None = None
    finish: Finish | None = None
    location: SourceLocation | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Document:
    header: CatalogHeader | None
    media_index: tuple[MaterialItem, ...]
    metric_unit: MetricUnit | None
    maincords: tuple[MainCord, ...] = ()
    # parse provenance; not part of document identity
    source: object | None = field(default=None, compare=False, repr=False)
    parse_diagnostics: tuple = field(default=(), compare=False, repr=False)
    doctype: str | None = field(default=None, compare=False, repr=False)
    # validate_structure findings for ``source``, filled in by the parser
    structure_diagnostics: tuple | None = field(default=None, compare=False, repr=False)

    def maincord_key(self, position: int) -> str:
        """Parent key of the maincord at ``position`` (0-based)."""
        index = self.maincords[position].index
        return index if index is not None else f"maincord-{position + 1}"

    def material(self, label: str) -> MaterialItem | None:
        for item in self.media_index:
            if item.label == label:
                return item
        return None


class CordVisit(NamedTuple):
    cord: Cord
    depth: int
    parent: str
    parent_cord: Cord | None
    maincord: int


def iterate_cords(document: Document) -> Iterator[CordVisit]:
    """Depth-first pre-order walk over every maincord's cord tree."""
    for position, main in enumerate(document.maincords):
        key = document.maincord_key(position)
        stack = [(c, 1, key, None) for c in reversed(main.cords)]
        while stack:
            cord, depth, parent, parent_cord = stack.pop()
            yield CordVisit(cord, depth, parent, parent_cord, position)
            parent_key = cord.index if cord.index is not None else parent
            for child in reversed(cord.children):
                stack.append((child, depth + 1, parent_key, cord))


def find_cord(document: Document, index: str) -> Cord | None:
    for visit in iterate_cords(document):
        if visit.cord.index == index:
            return visit.cord
    return None


def count_cords(document: Document) -> int:
    return sum(1 for _ in iterate_cords(document))


_XML_CHAR_RE = re.compile(r"[^\t\n\r\x20-\ud7ff\ue000-\ufffd\U00010000-\U0010ffff]")


def _text_problem(text: str) -> str | None:
    if text != text.strip(XML_WHITESPACE):
        return "has leading or trailing whitespace"
    if _XML_CHAR_RE.search(text):
        return "contains characters XML cannot carry"
    return None


def check_invariants(document: Document, max_depth: int = MAX_DEPTH) -> list[str]:
    """Return human-readable descriptions of every violated model invariant."""
    problems: list[str] = []

    def text(where: str, value: str | None, required: bool = False) -> None:
        if value is None:
            if required:
                problems.append(f"{where} is missing")
            return
        issue = _text_problem(value)
        if issue:
            problems.append(f"{where} {issue}")

    def attr(where: str, value: str | None) -> None:
        if value is not None and _XML_CHAR_RE.search(value):
            problems.append(f"{where} contains characters XML cannot carry")

    def number(where: str, value: Decimal | None, required: bool, positive: bool) -> None:
        if value is None:
            if required:
                problems.append(f"{where} is missing")
            return
        if not value.is_finite() or value < 0 or (positive and value == 0):
            problems.append(f"{where} must be {'positive' if positive else 'non-negative'}")

    ids: dict[str, str] = {}

    def ident(where: str, value: str | None, required: bool) -> None:
        if value is None:
            if required:
                problems.append(f"{where} is missing")
            return
        if not dtd.is_xml_name(value):
            problems.append(f"{where} {value!r} is not an XML name")
        if value in ids:
            problems.append(f"{where} {value!r} duplicates {ids[value]}")
        else:
            ids[value] = where

    def ref(where: str, value: str | None) -> None:
        if value is None:
            problems.append(f"{where} is missing")
        elif not dtd.is_xml_name(value):
            problems.append(f"{where} {value!r} is not an XML name")

    h = document.header
    if h is None:
        problems.append("catalog header is missing")
    else:
        text("source", h.source, required=True)
        if not h.codenames:
            problems.append("at least one codename is required")
        for c in h.codenames:
            text("codename", c)
        text("dating", h.dating)
        text("comment", h.comment)
        if h.author is not None:
            text("author name", h.author.name, required=True)
            for name in ("institution", "year", "email", "address"):
                text(f"author {name}", getattr(h.author, name))

    if not document.media_index:
        problems.append("media index must not be empty")
    for item in document.media_index:
        ident("material label", item.label, required=True)
        text(f"description of {item.label}", item.description, required=True)
        if item.color_rgb is not None and not item.color_rgb.is_valid:
            problems.append(f"color_rgb {item.color_rgb.value!r} is not #rrggbb")
        attr("color_iccnbs", item.color_iccnbs)
        for m in item.mixes:
            ref(f"mix of {item.label}", m)
    if document.metric_unit is None:
        problems.append("metric unit is missing")

    for n, main in enumerate(document.maincords, 1):
        where = f"maincord {n}"
        ident(f"{where} index", main.index, required=False)
        number(f"{where} lenght", main.lenght, True, True)
        number(f"{where} width", main.width, False, True)
        if main.material is not None:
            ref(f"{where} material", main.material)
        if not main.cords:
            problems.append(f"{where} has no cords")

    for visit in iterate_cords(document):
        cord = visit.cord
        where = f"cord {cord.index}"
        if visit.depth > max_depth:
            problems.append(f"{where} nested deeper than {max_depth}")
        ident("cord index", cord.index, required=True)
        number(f"{where} lenght", cord.lenght, True, True)
        number(f"{where} width", cord.width, False, True)
        number(f"{where} pos", cord.pos, True, False)
        number(f"{where} loop_pos", cord.loop_pos, False, False)
        if cord.cord_type is None:
            problems.append(f"{where} type is missing")
        for a in cord.attach_pendants:
            ref(f"{where} attaches", a.pendant)
        for seg in cord.media:
            ref(f"{where} material", seg.material)
            number(f"{where} material pos", seg.pos, True, False)
        for k in cord.knots:
            number(f"{where} knot pos", k.pos, True, False)
            text(f"{where} knot", k.content)
            if k.value is not None and k.content != str(k.value):
                problems.append(f"{where} knot value {k.content!r} is not canonical")
        text(f"{where} transcription", cord.transcription)
    return problems
