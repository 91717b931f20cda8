"""Toolkit for the Quipu Description Format (QDF 0.2)."""
from __future__ import annotations

__version__ = "0.1.0"

from .analysis import (
    Consistency, CordValueReport, DocumentStats, check_transcriptions, convert_units,
    decode_cord_value, export_csv, export_table, stats,
)
from .codec import canonicalize, serialize
from .diagnostics import Diagnostic, QdfError, Severity, SourceLocation, ValidationReport
from .model import (
    Attach, AttachRef, Author, CatalogHeader, Cord, CordType, Direction, Document, Finish,
    Knot, KnotKind, MainCord, MaterialItem, MaterialSegment, MetricUnit, RgbColor,
    find_cord, iterate_cords,
)
from .parser import ParseResult, parse, parse_file
from .render import render_svg, render_text
from .validator import Strictness, validate, validate_semantics, validate_structure

__all__ = [
    "Attach", "AttachRef", "Author", "CatalogHeader", "Consistency", "Cord", "CordType",
    "CordValueReport", "Diagnostic", "Direction", "Document", "DocumentStats", "Finish", "Knot",
    "KnotKind", "MainCord", "MaterialItem", "MaterialSegment", "MetricUnit", "ParseResult",
    "QdfError", "RgbColor", "Severity", "SourceLocation", "Strictness", "ValidationReport",
    "canonicalize", "check_transcriptions", "convert_units", "decode_cord_value", "export_csv",
    "export_table", "find_cord", "iterate_cords", "parse", "parse_file", "render_svg",
    "render_text", "serialize", "stats", "validate", "validate_semantics", "validate_structure",
]
