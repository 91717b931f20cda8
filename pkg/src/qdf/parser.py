"""Read QDF/XML bytes into a :class:`~qdf.model.Document`.

XML well-formedness is delegated to expat.  Entity declarations are refused
outright and the external ``qdf.dtd`` is never fetched, so parsing is
hermetic.  Structural checks run on the located element tree before the model
is built, which is why :class:`ParseResult` already carries DTD findings.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, replace
from decimal import Decimal
import functools
import os
import re
from xml.parsers import expat

from . import dtd
from .diagnostics import Diagnostic, SourceLocation, diag
from .model import (
    MAX_DEPTH, XML_WHITESPACE, Attach, AttachRef, Author, CatalogHeader, Cord, CordType,
    Direction, Document, Finish, Knot, KnotKind, MainCord, MaterialItem, MaterialSegment,
    MetricUnit, RgbColor, parse_count,
)
from .tree import Element
from .validator import validate_structure

_NUMBER_RE = re.compile(r"[0-9]+(\.[0-9]+)?")
# the model builder recurses once per cord level
_DEPTH_LIMIT = 256


@dataclass(frozen=True)
class ParseResult:
    document: Document | None
    diagnostics: tuple[Diagnostic, ...]

    @property
    def ok(self) -> bool:
        return self.document is not None and not any(d.is_error for d in self.diagnostics)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.is_error]


class _Fatal(Exception):
    def __init__(self, diagnostic: Diagnostic) -> None:
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


class _Locator:
    """Map byte offsets to 1-based line/column (columns count characters)."""

    def __init__(self, data: bytes, file: str | None) -> None:
        self.data = data
        self.file = file

    @functools.cached_property
    def newlines(self) -> list[int]:
        return [m.start() for m in re.finditer(b"\n", self.data)]

    def __call__(self, offset: int) -> SourceLocation:
        offset = max(0, min(offset, len(self.data)))
        line = bisect_right(self.newlines, offset - 1) + 1
        start = self.newlines[line - 2] + 1 if line > 1 else 0
        column = len(self.data[start:offset].decode("utf-8", "replace")) + 1
        return SourceLocation(line, column, offset, self.file)


def _read_tree(data: bytes, locate: _Locator, hard_depth: int):
    """Run expat; return (root, has_xml_decl, doctype name)."""
    parser = expat.ParserCreate(encoding="UTF-8")
    parser.SetParamEntityParsing(expat.XML_PARAM_ENTITY_PARSING_NEVER)
    prolog = {"decl": False, "doctype": None}
    stack: list[tuple[Element, list[str]]] = []
    roots: list[Element] = []

    def here() -> SourceLocation:
        # expat columns are 0-based and count characters
        return SourceLocation(parser.CurrentLineNumber, parser.CurrentColumnNumber + 1,
                              parser.CurrentByteIndex, locate.file)

    file = locate.file

    def start(name, attrs):
        if len(stack) >= hard_depth:
            raise _Fatal(diag("E-DEPTH", f"element nesting exceeds {hard_depth} levels",
                              here(), name))
        # expat hands over a fresh dict per element
        elem = Element(name, attrs, location=SourceLocation(
            parser.CurrentLineNumber, parser.CurrentColumnNumber + 1, parser.CurrentByteIndex, file))
        if stack:
            stack[-1][0].children.append(elem)
        else:
            roots.append(elem)
        stack.append((elem, []))

    def end(name):
        elem, parts = stack.pop()
        elem.text = "".join(parts)

    def chars(data):
        if stack:
            stack[-1][1].append(data)

    def xml_decl(version, encoding, standalone):
        prolog["decl"] = True

    def doctype(name, system_id, public_id, has_internal):
        prolog["doctype"] = name

    def entity_decl(name, is_parameter, *rest):
        raise _Fatal(diag("E-XML-ENTITY", f"entity declaration {name!r} refused", here(), name))

    def skipped(name, is_parameter):
        raise _Fatal(diag("E-XML-SYNTAX", f"undefined entity {name!r}", here(), name))

    parser.buffer_text = True
    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    parser.XmlDeclHandler = xml_decl
    parser.StartDoctypeDeclHandler = doctype
    parser.EntityDeclHandler = entity_decl
    parser.SkippedEntityHandler = skipped
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        offset = parser.ErrorByteIndex
        message = expat.ErrorString(exc.code) if exc.code else str(exc)
        if offset < 0:
            where = locate(len(data))
        else:
            where = SourceLocation(parser.ErrorLineNumber, parser.ErrorColumnNumber + 1, offset,
                                   locate.file)
        raise _Fatal(diag("E-XML-SYNTAX", message, where))
    return roots[0], prolog["decl"], prolog["doctype"]


def _clean_tree(root: Element, out: list[Diagnostic]) -> None:
    """Drop unknown elements and attributes, fold ``length`` into ``lenght``."""
    for elem in root.iter():
        kept = []
        for child in elem.children:
            if child.tag in dtd.ELEMENTS:
                kept.append(child)
            else:
                out.append(diag("E-UNKNOWN-ELEM", f"unknown element <{child.tag}> skipped",
                                child.location, child.tag))
        elem.children = kept
        if "length" in elem.attrs and "lenght" not in elem.attrs and dtd.attr_decl(elem.tag, "lenght"):
            attrs = {("lenght" if k == "length" else k): v for k, v in elem.attrs.items()}
            elem.attrs = attrs
            out.append(diag("I-LENGTH-ALIAS", f"{elem.tag}@length read as lenght",
                            elem.location, elem.attrs.get("index")))
        for name in list(elem.attrs):
            if dtd.attr_decl(elem.tag, name) is None:
                out.append(diag("W-UNKNOWN-ATTR", f"attribute {elem.tag}@{name} ignored",
                                elem.location, elem.attrs.get("index")))
                del elem.attrs[name]


def _text(elem: Element | None) -> str | None:
    if elem is None:
        return None
    return elem.text.strip(XML_WHITESPACE)


def _enum(cls, value: str | None, default=None):
    try:
        return cls(value)
    except ValueError:
        return default


class _Builder:
    def __init__(self, max_depth: int) -> None:
        self.max_depth = max_depth
        self.diagnostics: list[Diagnostic] = []

    def numbers(self, elem: Element) -> dict[str, Decimal | None] | None:
        """Numeric attributes of ``elem``; None (plus E-NUM) if any is unparsable."""
        values: dict[str, Decimal | None] = {}
        bad = []
        for decl in dtd.ATTLISTS.get(elem.tag, ()):
            if not decl.numeric:
                continue
            raw = elem.attrs.get(decl.name)
            if raw is None:
                values[decl.name] = None
                continue
            stripped = raw.strip(XML_WHITESPACE)
            if _NUMBER_RE.fullmatch(stripped):
                values[decl.name] = Decimal(stripped)
            else:
                bad.append(f"{elem.tag}@{decl.name}={raw!r}")
        if bad:
            self.diagnostics.append(diag(
                "E-NUM", f"not a non-negative decimal: {', '.join(bad)}; <{elem.tag}> skipped",
                elem.location, elem.attrs.get("index") or elem.attrs.get("id")))
            return None
        return values

    def document(self, root: Element) -> Document:
        about = root.find("about")
        header = self.header(about) if about is not None else None
        items = []
        for index in root.findall("media_index"):
            items.extend(self.material_item(e) for e in index.findall("material_item"))
        unit_elem = root.find("metric_unit")
        unit = _enum(MetricUnit, unit_elem.attrs.get("type")) if unit_elem is not None else None
        maincords = []
        for elem in root.findall("maincord"):
            main = self.maincord(elem)
            if main is not None:
                maincords.append(main)
        return Document(header, tuple(items), unit, tuple(maincords))

    def header(self, about: Element) -> CatalogHeader:
        author_elem = about.find("author")
        author = None
        if author_elem is not None:
            author = Author(
                name=_text(author_elem.find("name")),
                institution=_text(author_elem.find("institution")),
                year=_text(author_elem.find("year")),
                email=_text(author_elem.find("email")),
                address=_text(author_elem.find("address")),
            )
        return CatalogHeader(
            source=_text(about.find("source")),
            codenames=tuple(_text(e) for e in about.findall("codename")),
            dating=_text(about.find("dating")),
            author=author,
            comment=_text(about.find("comment")),
        )

    def material_item(self, elem: Element) -> MaterialItem:
        rgb = elem.find("color_rgb")
        iccnbs = elem.find("color_iccnbs")
        rgb_value = rgb.attrs.get("value") if rgb is not None else None
        return MaterialItem(
            label=elem.attrs.get("label"),
            description=_text(elem.find("description")),
            color_rgb=RgbColor(rgb_value) if rgb_value is not None else None,
            color_iccnbs=iccnbs.attrs.get("value") if iccnbs is not None else None,
            mixes=tuple(m.attrs.get("id") for m in elem.findall("mix")),
            location=elem.location,
        )

    def maincord(self, elem: Element) -> MainCord | None:
        nums = self.numbers(elem)
        if nums is None:
            return None
        cords = []
        for child in elem.findall("cord"):
            cord = self.cord(child, 1)
            if cord is not None:
                cords.append(cord)
        return MainCord(
            lenght=nums["lenght"],
            width=nums["width"],
            cords=tuple(cords),
            index=elem.attrs.get("index"),
            dir=_enum(Direction, elem.attrs.get("dir"), Direction.U),
            material=elem.attrs.get("material"),
            finish=_enum(Finish, elem.attrs.get("finish")),
            location=elem.location,
        )

    def cord(self, elem: Element, depth: int) -> Cord | None:
        if depth > self.max_depth:
            self.diagnostics.append(diag(
                "E-DEPTH", f"cord nested {depth} levels deep (cap {self.max_depth}); subtree skipped",
                elem.location, elem.attrs.get("index")))
            return None
        nums = self.numbers(elem)
        if nums is None:
            return None
        attaches: list[AttachRef] = []
        media: list[MaterialSegment] = []
        knots: list[Knot] = []
        children: list[Cord] = []
        transcription = None
        for child in elem.children:
            if child.tag == "attach_pendants":
                attaches.extend(AttachRef(a.attrs.get("pendant"), a.location)
                                for a in child.findall("attaches"))
            elif child.tag == "media":
                for m in child.findall("material"):
                    seg = self.segment(m)
                    if seg is not None:
                        media.append(seg)
            elif child.tag == "knots":
                for k in child.children:
                    knot = self.knot(k)
                    if knot is not None:
                        knots.append(knot)
            elif child.tag == "cord":
                sub = self.cord(child, depth + 1)
                if sub is not None:
                    children.append(sub)
            elif child.tag == "transcription" and transcription is None:
                transcription = _text(child)
        return Cord(
            index=elem.attrs.get("index"),
            lenght=nums["lenght"],
            width=nums["width"],
            pos=nums["pos"],
            dir=_enum(Direction, elem.attrs.get("dir"), Direction.U),
            attach=_enum(Attach, elem.attrs.get("attach"), Attach.U),
            attach_through=elem.attrs.get("attach_through") == "yes",
            cord_type=_enum(CordType, elem.attrs.get("type")),
            loop_pos=nums["loop_pos"],
            finish=_enum(Finish, elem.attrs.get("finish")),
            attach_pendants=tuple(attaches),
            media=tuple(media),
            knots=tuple(knots),
            children=tuple(children),
            transcription=transcription,
            location=elem.location,
        )

    def segment(self, elem: Element) -> MaterialSegment | None:
        nums = self.numbers(elem)
        if nums is None:
            return None
        return MaterialSegment(elem.attrs.get("id"), nums["pos"], elem.location)

    def knot(self, elem: Element) -> Knot | None:
        kind = _enum(KnotKind, elem.tag)
        if kind is None:
            return None
        nums = self.numbers(elem)
        if nums is None:
            return None
        content = _text(elem)
        value = parse_count(content)
        if value is not None:
            content = str(value)
        return Knot(kind, nums["pos"], content,
                    _enum(Direction, elem.attrs.get("dir"), Direction.U), elem.location)


def _sorted(diagnostics) -> tuple[Diagnostic, ...]:
    return tuple(sorted(diagnostics, key=Diagnostic.sort_key))


def parse(data: bytes | str, *, strict: bool = False, max_depth: int = MAX_DEPTH,
          filename: str | None = None) -> ParseResult:
    """Parse QDF/XML bytes.

    Never raises on bad input: fatal problems come back as a ParseResult with
    no document and at least one error diagnostic.
    """
    if not 1 <= max_depth <= _DEPTH_LIMIT:
        raise ValueError(f"max_depth must be between 1 and {_DEPTH_LIMIT}")
    if isinstance(data, str):
        data = data.encode("utf-8")
    locate = _Locator(data, filename)
    try:
        data.decode("utf-8")
    except UnicodeDecodeError as exc:
        return ParseResult(None, (diag("E-UTF8", f"invalid UTF-8 byte sequence ({exc.reason})",
                                       locate(exc.start)),))
    try:
        root, has_decl, doctype = _read_tree(data, locate, hard_depth=max_depth + 8)
    except _Fatal as fatal:
        return ParseResult(None, (fatal.diagnostic,))
    if root.tag != "quipu":
        return ParseResult(None, (diag("E-ROOT", f"root element is <{root.tag}>, expected <quipu>",
                                       root.location, root.tag),))

    stage: list[Diagnostic] = []
    if not has_decl:
        stage.append(diag("W-PROLOG", "XML declaration <?xml version=\"1.0\"?> missing", locate(0)))
    if doctype != "quipu":
        what = "missing" if doctype is None else f"names {doctype!r}"
        stage.append(diag("W-PROLOG", f"DOCTYPE quipu declaration {what}", locate(0)))
    _clean_tree(root, stage)
    builder = _Builder(max_depth)
    document = builder.document(root)
    stage.extend(builder.diagnostics)

    parse_stage = _sorted(stage)
    document = replace(document, source=root, parse_diagnostics=parse_stage, doctype=doctype)
    structure = validate_structure(document).diagnostics
    document = replace(document, structure_diagnostics=structure)
    everything = list(parse_stage) + list(structure)
    if strict:
        everything = [d.upgraded() if d.code == "W-PROLOG" else d for d in everything]
    return ParseResult(document, _sorted(everything))


def parse_file(path: str | os.PathLike, **kwargs) -> ParseResult:
    """Parse a file; diagnostics carry its name.  ``-`` is not special here."""
    name = os.fspath(path)
    try:
        with open(name, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        reason = exc.strerror or exc.__class__.__name__
        return ParseResult(None, (diag("E-IO", f"cannot read {name}: {reason}", None, name),))
    return parse(data, filename=name, **kwargs)


__all__ = ["ParseResult", "parse", "parse_file"]
