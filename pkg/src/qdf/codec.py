"""Canonical QDF/XML serialization.

There is exactly one output form: prolog lines, sections and attributes in
DTD declaration order, four-space indentation, ``lenght`` spelling, defaults
(``dir="U"``, ``attach="U"``, ``attach_through="no"``) omitted, self-closing
empty elements, and a trailing newline.  Comments do not survive.
"""
from __future__ import annotations

from decimal import Decimal
from enum import Enum

from . import dtd
from .diagnostics import QdfError
from .model import (
    Attach, Cord, Direction, Document, KnotKind, MainCord, MaterialItem, check_invariants,
)
from .tree import Element

PROLOG = '<?xml version="1.0"?>\n<!DOCTYPE quipu SYSTEM "qdf.dtd">\n'
INDENT = "    "
_KIND_RANK = {KnotKind.SINGLE: 0, KnotKind.MULTIPLE: 1, KnotKind.EIGHT: 2}


def format_number(value: Decimal) -> str:
    """Integers without a decimal point; fractions with minimal digits."""
    if value == value.to_integral_value():
        return str(int(value))
    return format(value.normalize(), "f")


def _attrs(tag: str, values: dict[str, object]) -> dict[str, str]:
    out = {}
    for decl in dtd.ATTLISTS[tag]:
        value = values.get(decl.name)
        if value is None:
            continue
        if isinstance(value, Decimal):
            value = format_number(value)
        elif isinstance(value, Enum):
            value = value.value
        out[decl.name] = str(value)
    return out


def _leaf(tag: str, text: str | None) -> Element | None:
    return None if text is None else Element(tag, text=text)


def _material_item(item: MaterialItem) -> Element:
    elem = Element("material_item", _attrs("material_item", {"label": item.label}))
    if item.description is not None:
        elem.children.append(Element("description", text=item.description))
    if item.color_rgb is not None:
        elem.children.append(Element("color_rgb", {"value": item.color_rgb.value}))
    if item.color_iccnbs is not None:
        elem.children.append(Element("color_iccnbs", {"value": item.color_iccnbs}))
    for mix in item.mixes:
        elem.children.append(Element("mix", _attrs("mix", {"id": mix})))
    return elem


def _knot_groups(cord: Cord) -> list[Element]:
    """Split knots into ``<knots>`` runs that respect single/multiple/eight order."""
    groups: list[Element] = []
    rank = None
    for knot in cord.knots:
        if rank is None or _KIND_RANK[knot.kind] < rank:
            groups.append(Element("knots"))
        rank = _KIND_RANK[knot.kind]
        groups[-1].children.append(Element(knot.kind.value, _attrs(knot.kind.value, {
            "dir": None if knot.dir is Direction.U else knot.dir,
            "pos": knot.pos,
        }), text=knot.content))
    return groups


def _cord(cord: Cord) -> Element:
    elem = Element("cord", _attrs("cord", {
        "index": cord.index,
        "lenght": cord.lenght,
        "width": cord.width,
        "pos": cord.pos,
        "dir": None if cord.dir is Direction.U else cord.dir,
        "attach": None if cord.attach is Attach.U else cord.attach,
        "attach_through": "yes" if cord.attach_through else None,
        "type": cord.cord_type,
        "loop_pos": cord.loop_pos,
        "finish": cord.finish,
    }))
    if cord.attach_pendants:
        group = Element("attach_pendants")
        group.children = [Element("attaches", _attrs("attaches", {"pendant": a.pendant}))
                          for a in cord.attach_pendants]
        elem.children.append(group)
    media = Element("media")
    media.children = [Element("material", _attrs("material", {"id": s.material, "pos": s.pos}))
                      for s in cord.media]
    elem.children.append(media)
    elem.children.extend(_knot_groups(cord))
    elem.children.extend(_cord(child) for child in cord.children)
    if cord.transcription is not None:
        elem.children.append(Element("transcription", text=cord.transcription))
    return elem


def _maincord(main: MainCord) -> Element:
    elem = Element("maincord", _attrs("maincord", {
        "dir": None if main.dir is Direction.U else main.dir,
        "lenght": main.lenght,
        "width": main.width,
        "index": main.index,
        "material": main.material,
        "finish": main.finish,
    }))
    elem.children = [_cord(c) for c in main.cords]
    return elem


def to_tree(document: Document) -> Element:
    """The element tree :func:`serialize` writes; total even on invalid models."""
    root = Element("quipu")
    h = document.header
    if h is not None:
        about = Element("about")
        about.children = [e for e in (
            _leaf("source", h.source),
            _leaf("dating", h.dating),
            *(Element("codename", text=c) for c in h.codenames),
        ) if e is not None]
        if h.author is not None:
            a = h.author
            author = Element("author")
            author.children = [e for e in (
                _leaf("name", a.name), _leaf("institution", a.institution),
                _leaf("year", a.year), _leaf("email", a.email), _leaf("address", a.address),
            ) if e is not None]
            about.children.append(author)
        if h.comment is not None:
            about.children.append(Element("comment", text=h.comment))
        root.children.append(about)
    index = Element("media_index")
    index.children = [_material_item(m) for m in document.media_index]
    root.children.append(index)
    if document.metric_unit is not None:
        root.children.append(Element("metric_unit", {"type": document.metric_unit.value}))
    root.children.extend(_maincord(m) for m in document.maincords)
    return root


def _escape_text(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace("\r", "&#13;"))


def _escape_attr(text: str) -> str:
    return (_escape_text(text).replace('"', "&quot;")
            .replace("\t", "&#9;").replace("\n", "&#10;"))


def write_tree(root: Element) -> str:
    lines: list[str] = []
    # (element, depth, closing?) work list keeps deep documents off the C stack
    work: list[tuple[Element, int, bool]] = [(root, 0, False)]
    while work:
        elem, depth, closing = work.pop()
        pad = INDENT * depth
        if closing:
            lines.append(f"{pad}</{elem.tag}>")
            continue
        attrs = "".join(f' {k}="{_escape_attr(v)}"' for k, v in elem.attrs.items())
        if elem.children:
            lines.append(f"{pad}<{elem.tag}{attrs}>")
            work.append((elem, depth, True))
            work.extend((c, depth + 1, False) for c in reversed(elem.children))
        elif elem.text:
            lines.append(f"{pad}<{elem.tag}{attrs}>{_escape_text(elem.text)}</{elem.tag}>")
        else:
            lines.append(f"{pad}<{elem.tag}{attrs}/>")
    return PROLOG + "\n".join(lines) + "\n"


def serialize(document: Document) -> str:
    """Canonical QDF/XML text; raises QdfError(E-MODEL-INVARIANT) on invalid models."""
    problems = check_invariants(document)
    if problems:
        raise QdfError("E-MODEL-INVARIANT", "; ".join(problems))
    return write_tree(to_tree(document))


def canonicalize(data: bytes | str) -> str:
    """serialize(parse(data).document); fatal parse errors raise QdfError."""
    from .parser import parse

    result = parse(data)
    if result.document is None:
        first = result.diagnostics[0]
        raise QdfError(first.code, first.message, result.diagnostics)
    return serialize(result.document)
