"""Structural (DTD) and semantic validation of QDF documents."""
from __future__ import annotations

from enum import Enum

from . import dtd
from .diagnostics import (
    STRICT_UPGRADES, Diagnostic, SourceLocation, ValidationReport, diag,
)
from .model import (
    XML_WHITESPACE, CordType, Document, iterate_cords, parse_int,
)
from .codec import format_number as _num, to_tree
from .tree import Element

_ORDER_CODES = {"quipu": "E-SECTION-ORDER", "knots": "E-KNOT-ORDER"}
_TEXT_REQUIRED = frozenset(["source", "name"])
_POSITIONS = {tag: {p.name: i for i, p in enumerate(model)}
              for tag, model in dtd.CONTENT.items() if isinstance(model, tuple)}


class Strictness(str, Enum):
    LENIENT = "lenient"
    STRICT = "strict"


def _subject(elem: Element) -> str | None:
    return elem.attrs.get("index") or elem.attrs.get("label")


def _check_content(elem: Element, subject: str | None, out: list[Diagnostic]) -> None:
    model = dtd.CONTENT[elem.tag]
    loc = elem.location
    has_text = bool(elem.text.strip(XML_WHITESPACE))
    if model == dtd.EMPTY:
        if elem.children or has_text:
            out.append(diag("E-CONTENT", f"<{elem.tag}> must be empty", loc, subject))
        return
    if model == dtd.PCDATA:
        if elem.children:
            out.append(diag("E-CONTENT", f"<{elem.tag}> holds text only, found "
                            f"<{elem.children[0].tag}>", elem.children[0].location, subject))
        elif elem.tag in _TEXT_REQUIRED and not has_text:
            out.append(diag("E-TEXT-REQUIRED", f"<{elem.tag}> must not be empty", loc, subject))
        return
    if has_text:
        out.append(diag("E-CONTENT", f"text not allowed directly inside <{elem.tag}>", loc, subject))
    position = _POSITIONS[elem.tag]
    counts = [0] * len(model)
    current = 0
    for child in elem.children:
        i = position.get(child.tag)
        if i is None:
            out.append(diag("E-CHILD-UNEXPECTED", f"<{child.tag}> not allowed in <{elem.tag}>",
                            child.location, subject))
            continue
        if i < current:
            out.append(diag(_ORDER_CODES.get(elem.tag, "E-CHILD-ORDER"),
                            f"<{child.tag}> must come before <{model[current].name}> in <{elem.tag}>",
                            child.location, subject))
        else:
            current = i
        counts[i] += 1
        limit = model[i].max
        if limit is not None and counts[i] > limit:
            out.append(diag("E-CHILD-REPEAT", f"<{child.tag}> may occur at most {limit} "
                            f"time(s) in <{elem.tag}>", child.location, subject))
    for particle, count in zip(model, counts):
        if count < particle.min:
            out.append(diag("E-CHILD-REQUIRED", f"<{elem.tag}> requires <{particle.name}>",
                            loc, subject))


def validate_structure(document: Document) -> ValidationReport:
    """Check the document against the QDF content models and attribute lists.

    Parsed documents are checked through the element tree they came from, so
    ordering and repetition problems keep their source locations; built
    documents are checked through the tree the serializer would emit.
    """
    root = document.source
    if isinstance(root, Element) and document.structure_diagnostics is not None:
        return ValidationReport(tuple(document.structure_diagnostics))
    if not isinstance(root, Element):
        root = to_tree(document)
    out: list[Diagnostic] = []
    seen_ids: dict[str, SourceLocation | None] = {}
    for elem in root.iter():
        if elem.tag not in dtd.CONTENT:
            continue
        subject = _subject(elem)
        _check_content(elem, subject, out)
        loc = elem.location
        for decl in dtd.ATTLISTS.get(elem.tag, ()):
            value = elem.attrs.get(decl.name)
            if value is None:
                if decl.required:
                    out.append(diag("E-ATTR-REQUIRED", f"{elem.tag}@{decl.name} is required",
                                    loc, subject))
                continue
            if isinstance(decl.type, tuple):
                if value not in decl.type:
                    out.append(diag("E-ENUM", f"{elem.tag}@{decl.name}={value!r} not one of "
                                    f"{'|'.join(decl.type)}", loc, subject))
            elif decl.type in ("ID", "IDREF"):
                if not dtd.is_xml_name(value):
                    out.append(diag("E-ID-SYNTAX", f"{elem.tag}@{decl.name}={value!r} is not "
                                    "an XML name", loc, value))
                if decl.type == "ID":
                    if value in seen_ids:
                        out.append(diag("E-ID-DUP", f"ID {value!r} already declared", loc, value))
                    else:
                        seen_ids[value] = loc
        if elem.tag == "color_rgb":
            value = elem.attrs.get("value")
            if value is not None and not dtd.is_rgb(value):
                out.append(diag("E-RGB", f"color_rgb value {value!r} is not #rrggbb", loc, value))
    return ValidationReport(tuple(out))


def validate_semantics(document: Document) -> ValidationReport:
    """Check the rules the DTD cannot express: references, loops, positions."""
    out: list[Diagnostic] = []
    labels: dict[str, int] = {}
    for i, item in enumerate(document.media_index):
        if item.label is not None:
            labels.setdefault(item.label, i)
    for i, item in enumerate(document.media_index):
        for mix in item.mixes:
            if mix is None:
                continue
            if mix == item.label:
                out.append(diag("E-MIX-SELF", f"material {item.label!r} mixes itself",
                                item.location, item.label))
            elif mix not in labels:
                out.append(diag("E-BADREF", f"mix id {mix!r} names no material item",
                                item.location, item.label))
            elif labels[mix] > i:
                out.append(diag("E-MIX-ORDER", f"mix id {mix!r} is declared after "
                                f"{item.label!r}", item.location, item.label))

    for main in document.maincords:
        if main.material is not None and main.material not in labels:
            out.append(diag("E-BADREF", f"maincord material {main.material!r} names no "
                            "material item", main.location, main.index))
        for name in ("lenght", "width"):
            if getattr(main, name) == 0:
                out.append(diag("E-RANGE", f"maincord {name} must be positive",
                                main.location, main.index))

    # a cord missing <media> altogether already has E-CHILD-REQUIRED
    no_media: set = set()
    if isinstance(document.source, Element):
        no_media = {e.location for e in document.source.iter()
                    if e.tag == "cord" and e.find("media") is None}

    visits = list(iterate_cords(document))
    order: dict[str, int] = {}
    for n, visit in enumerate(visits):
        if visit.cord.index is not None:
            order.setdefault(visit.cord.index, n)

    for n, visit in enumerate(visits):
        cord = visit.cord
        who, loc = cord.index, cord.location
        for name in ("lenght", "width"):
            if getattr(cord, name) == 0:
                out.append(diag("E-RANGE", f"cord {name} must be positive", loc, who))
        if cord.cord_type is CordType.LOOP and cord.loop_pos is None:
            out.append(diag("E-LOOPPOS", "loop cord needs loop_pos", loc, who))
        if cord.attach_pendants and cord.cord_type not in (None, CordType.TOP):
            out.append(diag("E-TOP-ONLY", f"attach_pendants on a {cord.cord_type.value} cord",
                            loc, who))
        for ref in cord.attach_pendants:
            if ref.pendant is None:
                continue
            if ref.pendant not in order:
                out.append(diag("E-BADREF", f"attaches pendant {ref.pendant!r} names no cord",
                                ref.location or loc, who))
            elif order[ref.pendant] >= n:
                out.append(diag("W-ATTACH-FWD", f"attaches pendant {ref.pendant!r} is not "
                                "described before this cord", ref.location or loc, who))

        if visit.parent_cord is None:
            parent_len = document.maincords[visit.maincord].lenght
        else:
            parent_len = visit.parent_cord.lenght
        if parent_len is not None:
            if cord.pos is not None and cord.pos > parent_len:
                out.append(diag("W-POS-RANGE", f"pos {_num(cord.pos)} beyond parent lenght "
                                f"{_num(parent_len)}", loc, who))
            if cord.loop_pos is not None and cord.loop_pos > parent_len:
                out.append(diag("W-POS-RANGE", f"loop_pos {_num(cord.loop_pos)} beyond parent "
                                f"lenght {_num(parent_len)}", loc, who))

        for knot in cord.knots:
            if cord.lenght is not None and knot.pos is not None and knot.pos > cord.lenght:
                out.append(diag("W-POS-RANGE", f"{knot.kind.value} knot at {_num(knot.pos)} beyond "
                                f"cord lenght {_num(cord.lenght)}", knot.location or loc, who))
            if knot.value is None:
                out.append(diag("W-KNOT-NONNUM", f"{knot.kind.value} knot content "
                                f"{knot.content!r} is not a count", knot.location or loc, who))

        if not cord.media and not (loc is not None and loc in no_media):
            out.append(diag("W-EMPTY-MEDIA", "cord has no material segments", loc, who))
        previous = None
        for seg in cord.media:
            if seg.material is not None and seg.material not in labels:
                out.append(diag("E-BADREF", f"material id {seg.material!r} names no material "
                                "item", seg.location or loc, who))
            if seg.pos is None:
                continue
            if seg.pos == 0:
                out.append(diag("E-RANGE", "material segment must end after position 0",
                                seg.location or loc, who))
            if previous is not None and seg.pos <= previous:
                out.append(diag("W-SEG-ORDER", f"segment ending at {_num(seg.pos)} follows one "
                                f"ending at {_num(previous)}", seg.location or loc, who))
            previous = seg.pos
        last = cord.media[-1].pos if cord.media else None
        if last is not None and cord.lenght is not None and last != cord.lenght:
            out.append(diag("W-SEG-LEN", f"last material segment ends at {_num(last)}, cord lenght "
                            f"is {_num(cord.lenght)}", loc, who))

        if cord.transcription is not None and parse_int(cord.transcription) is None:
            out.append(diag("W-TRANSCRIPT-NONNUM", f"transcription {cord.transcription!r} is "
                            "not an integer", loc, who))
    return ValidationReport(tuple(out))


def validate(document: Document, strictness: Strictness | str = Strictness.LENIENT
             ) -> ValidationReport:
    """Parse-stage, structural and semantic findings, ordered by position then code."""
    strictness = Strictness(strictness)
    found = list(document.parse_diagnostics)
    found += validate_structure(document).diagnostics
    found += validate_semantics(document).diagnostics
    if strictness is Strictness.STRICT:
        found = [d.upgraded() if d.code in STRICT_UPGRADES else d for d in found]
    found.sort(key=Diagnostic.sort_key)
    return ValidationReport(tuple(found))
