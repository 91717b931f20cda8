"""Knot decoding, transcription checks, unit conversion, statistics, CSV export."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_UP, Decimal, localcontext
from enum import Enum
import io

from .codec import format_number
from .model import (
    Cord, CordType, Document, KnotKind, MetricUnit, iterate_cords, parse_int,
)

#: millimetres per unit
MM_PER_UNIT = {MetricUnit.MM: Decimal(1), MetricUnit.CM: Decimal(10), MetricUnit.IN: Decimal("25.4")}
#: decimal places kept after conversion; 5 keeps an mm->in->mm trip within 1e-3 mm
CONVERSION_PLACES = 5
ROUND_TRIP_TOLERANCE = Decimal("0.001")
_QUANTUM = Decimal(1).scaleb(-CONVERSION_PLACES)

EXPORT_COLUMNS = (
    "cord_index", "parent", "type", "lenght", "pos", "dir", "attach",
    "material_labels", "knot_count", "decoded_value", "transcription",
)


class Consistency(str, Enum):
    MATCH = "match"
    MISMATCH = "mismatch"
    UNCHECKED = "unchecked"


@dataclass(frozen=True)
class CordValueReport:
    cord_index: str | None
    decoded: int | None
    transcription: int | None
    consistent: Consistency


@dataclass(frozen=True)
class DocumentStats:
    maincord_count: int
    cord_count: int
    cords_by_type: dict[str, int]
    knot_count: int
    knots_by_kind: dict[str, int]
    material_count: int
    total_cord_lenght: Decimal
    unit: str | None = field(default=None)

    def as_dict(self) -> dict:
        return {
            "maincord_count": self.maincord_count,
            "cord_count": self.cord_count,
            "cords_by_type": dict(self.cords_by_type),
            "knot_count": self.knot_count,
            "knots_by_kind": dict(self.knots_by_kind),
            "material_count": self.material_count,
            "total_cord_lenght": format_number(self.total_cord_lenght),
            "unit": self.unit,
        }


def decode_cord_value(cord: Cord) -> int | None:
    """Sum of the cord's own knot values; None if any knot is not a count.

    Child cords do not contribute.
    """
    total = 0
    for knot in cord.knots:
        value = knot.value
        if value is None:
            return None
        total += value
    return total


def check_transcriptions(document: Document) -> list[CordValueReport]:
    reports = []
    for visit in iterate_cords(document):
        cord = visit.cord
        decoded = decode_cord_value(cord)
        written = parse_int(cord.transcription)
        if decoded is None or written is None:
            status = Consistency.UNCHECKED
        elif decoded == written:
            status = Consistency.MATCH
        else:
            status = Consistency.MISMATCH
        reports.append(CordValueReport(cord.index, decoded, written, status))
    return reports


def _scale(value: Decimal | None, factor: Decimal) -> Decimal | None:
    if value is None:
        return None
    # enough precision that quantize never overflows on long digit strings
    prec = max(28, value.adjusted() + CONVERSION_PLACES + 12)
    with localcontext() as ctx:
        ctx.prec = prec
        return (value * factor).quantize(_QUANTUM, rounding=ROUND_HALF_UP)


def _convert_cord(cord: Cord, f: Decimal) -> Cord:
    return replace(
        cord,
        lenght=_scale(cord.lenght, f),
        width=_scale(cord.width, f),
        pos=_scale(cord.pos, f),
        loop_pos=_scale(cord.loop_pos, f),
        media=tuple(replace(s, pos=_scale(s.pos, f)) for s in cord.media),
        knots=tuple(replace(k, pos=_scale(k.pos, f)) for k in cord.knots),
        children=tuple(_convert_cord(c, f) for c in cord.children),
    )


def convert_units(document: Document, target: MetricUnit | str) -> Document:
    """Rescale every length and position to ``target``.

    Converting to the document's own unit returns it unchanged.
    """
    target = MetricUnit(target)
    if document.metric_unit is None:
        raise ValueError("document declares no metric unit")
    if document.metric_unit is target:
        return document
    f = MM_PER_UNIT[document.metric_unit] / MM_PER_UNIT[target]
    maincords = tuple(
        replace(m, lenght=_scale(m.lenght, f), width=_scale(m.width, f),
                cords=tuple(_convert_cord(c, f) for c in m.cords))
        for m in document.maincords
    )
    # the source tree holds the old magnitudes, so it cannot follow
    return replace(document, metric_unit=target, maincords=maincords, source=None,
                   structure_diagnostics=None)


def stats(document: Document) -> DocumentStats:
    by_type = {t.value: 0 for t in CordType}
    by_kind = {k.value: 0 for k in KnotKind}
    total = Decimal(0)
    cords = 0
    for visit in iterate_cords(document):
        cord = visit.cord
        cords += 1
        if cord.cord_type is not None:
            by_type[cord.cord_type.value] += 1
        for knot in cord.knots:
            by_kind[knot.kind.value] += 1
        if cord.lenght is not None:
            total += cord.lenght
    unit = document.metric_unit.value if document.metric_unit else None
    return DocumentStats(
        maincord_count=len(document.maincords),
        cord_count=cords,
        cords_by_type=by_type,
        knot_count=sum(by_kind.values()),
        knots_by_kind=by_kind,
        material_count=len(document.media_index),
        total_cord_lenght=total,
        unit=unit,
    )


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Decimal):
        return format_number(value)
    if isinstance(value, Enum):
        return value.value
    return str(value)


def export_table(document: Document) -> list[tuple[str, ...]]:
    """One text row per cord in traversal order (no header)."""
    rows = []
    for visit in iterate_cords(document):
        cord = visit.cord
        labels = ";".join(s.material for s in cord.media if s.material is not None)
        rows.append(tuple(_cell(v) for v in (
            cord.index, visit.parent, cord.cord_type, cord.lenght, cord.pos, cord.dir,
            cord.attach, labels, len(cord.knots), decode_cord_value(cord), cord.transcription,
        )))
    return rows


def export_csv(document: Document) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(EXPORT_COLUMNS)
    writer.writerows(export_table(document))
    return buf.getvalue()


__all__ = [
    "Consistency", "CordValueReport", "DocumentStats", "EXPORT_COLUMNS", "check_transcriptions",
    "convert_units", "decode_cord_value", "export_csv", "export_table", "stats",
]
