"""Built-in QDF 0.2 document type rules.

The external ``qdf.dtd`` file is never read; these tables are the rule set the
validator, parser and serializer share.
"""
from __future__ import annotations

from dataclasses import dataclass
import re

EMPTY = "EMPTY"
PCDATA = "#PCDATA"

DIRECTIONS = ("S", "Z", "U")
FINISHES = ("knotted", "broken", "none")
ATTACHES = ("verso", "recto", "U")
YES_NO = ("yes", "no")
CORD_TYPES = ("pendant", "top", "subsidiary", "loop")
UNITS = ("mm", "cm", "in")
KNOT_KINDS = ("single", "multiple", "eight")


@dataclass(frozen=True)
class Particle:
    name: str
    min: int = 1
    max: int | None = 1  # None = unbounded


@dataclass(frozen=True)
class AttrDecl:
    name: str
    type: str | tuple[str, ...]  # "CDATA", "ID", "IDREF" or an enumeration
    required: bool = False
    numeric: bool = False


def _seq(*items: str) -> tuple[Particle, ...]:
    out = []
    for item in items:
        if item.endswith("*"):
            out.append(Particle(item[:-1], 0, None))
        elif item.endswith("+"):
            out.append(Particle(item[:-1], 1, None))
        elif item.endswith("?"):
            out.append(Particle(item[:-1], 0, 1))
        else:
            out.append(Particle(item))
    return tuple(out)


CONTENT: dict[str, str | tuple[Particle, ...]] = {
    "quipu": _seq("about", "media_index", "metric_unit", "maincord*"),
    "about": _seq("source", "dating?", "codename+", "author?", "comment?"),
    "source": PCDATA,
    "dating": PCDATA,
    "codename": PCDATA,
    "comment": PCDATA,
    "author": _seq("name", "institution?", "year?", "email?", "address?"),
    "name": PCDATA,
    "institution": PCDATA,
    "year": PCDATA,
    "email": PCDATA,
    "address": PCDATA,
    "media_index": _seq("material_item+"),
    "material_item": _seq("description", "color_rgb?", "color_iccnbs?", "mix*"),
    "description": PCDATA,
    "color_rgb": EMPTY,
    "color_iccnbs": EMPTY,
    "mix": EMPTY,
    "metric_unit": EMPTY,
    "maincord": _seq("cord+"),
    "cord": _seq("attach_pendants*", "media", "knots*", "cord*", "transcription?"),
    "attach_pendants": _seq("attaches+"),
    "attaches": EMPTY,
    "media": _seq("material*"),
    "material": EMPTY,
    "knots": _seq("single*", "multiple*", "eight*"),
    "single": PCDATA,
    "multiple": PCDATA,
    "eight": PCDATA,
    "transcription": PCDATA,
}

_KNOT_ATTRS = (
    AttrDecl("dir", DIRECTIONS),
    AttrDecl("pos", "CDATA", required=True, numeric=True),
)

# Declaration order doubles as the canonical serialization order.
ATTLISTS: dict[str, tuple[AttrDecl, ...]] = {
    "material_item": (AttrDecl("label", "ID", required=True),),
    "color_rgb": (AttrDecl("value", "CDATA", required=True),),
    "color_iccnbs": (AttrDecl("value", "CDATA", required=True),),
    "mix": (AttrDecl("id", "IDREF", required=True),),
    "metric_unit": (AttrDecl("type", UNITS, required=True),),
    "maincord": (
        AttrDecl("dir", DIRECTIONS),
        AttrDecl("lenght", "CDATA", required=True, numeric=True),
        AttrDecl("width", "CDATA", numeric=True),
        AttrDecl("index", "ID"),
        AttrDecl("material", "IDREF"),
        AttrDecl("finish", FINISHES),
    ),
    "cord": (
        AttrDecl("index", "ID", required=True),
        AttrDecl("lenght", "CDATA", required=True, numeric=True),
        AttrDecl("width", "CDATA", numeric=True),
        AttrDecl("pos", "CDATA", required=True, numeric=True),
        AttrDecl("dir", DIRECTIONS),
        AttrDecl("attach", ATTACHES),
        AttrDecl("attach_through", YES_NO),
        AttrDecl("type", CORD_TYPES, required=True),
        AttrDecl("loop_pos", "CDATA", numeric=True),
        AttrDecl("finish", FINISHES),
    ),
    "attaches": (AttrDecl("pendant", "IDREF", required=True),),
    "material": (
        AttrDecl("id", "IDREF", required=True),
        AttrDecl("pos", "CDATA", required=True, numeric=True),
    ),
    "single": _KNOT_ATTRS,
    "multiple": _KNOT_ATTRS,
    "eight": _KNOT_ATTRS,
}

ELEMENTS = frozenset(CONTENT)


def attr_decl(element: str, name: str) -> AttrDecl | None:
    for decl in ATTLISTS.get(element, ()):
        if decl.name == name:
            return decl
    return None


# XML 1.0 (5th ed.) Name production; ID and IDREF values must match it.
_NAME_START = (
    ":A-Z_a-z\\xc0-\\xd6\\xd8-\\xf6\\xf8-\\u02ff\\u0370-\\u037d\\u037f-\\u1fff"
    "\\u200c-\\u200d\\u2070-\\u218f\\u2c00-\\u2fef\\u3001-\\ud7ff\\uf900-\\ufdcf"
    "\\ufdf0-\\ufffd\\U00010000-\\U000effff"
)
_NAME_CHAR = _NAME_START + "\\-.0-9\\xb7\\u0300-\\u036f\\u203f-\\u2040"
NAME_RE = re.compile(f"[{_NAME_START}][{_NAME_CHAR}]*")

RGB_RE = re.compile(r"#[0-9A-Fa-f]{6}")


def is_xml_name(value: str) -> bool:
    return NAME_RE.fullmatch(value) is not None


def is_rgb(value: str) -> bool:
    return RGB_RE.fullmatch(value) is not None
