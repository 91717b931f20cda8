"""Diagnostics shared by the parser, validator and CLI.

Codes are a stability contract: renaming one is a breaking change.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import NamedTuple


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


E, W, I = Severity.ERROR, Severity.WARNING, Severity.INFO

#: code -> (default severity, one-line description)
CODES: dict[str, tuple[Severity, str]] = {
    # parse stage
    "E-IO": (E, "input path could not be read"),
    "E-UTF8": (E, "input is not valid UTF-8"),
    "E-XML-SYNTAX": (E, "input is not well-formed XML"),
    "E-XML-ENTITY": (E, "entity declarations are not supported"),
    "E-ROOT": (E, "root element is not quipu"),
    "E-DEPTH": (E, "cord nesting exceeds the configured depth cap"),
    "E-NUM": (E, "numeric attribute could not be parsed; element skipped"),
    "E-UNKNOWN-ELEM": (E, "element is not part of QDF; skipped"),
    "W-UNKNOWN-ATTR": (W, "attribute is not declared for this element; ignored"),
    "W-PROLOG": (W, "XML declaration or quipu DOCTYPE missing"),
    "I-LENGTH-ALIAS": (I, "'length' accepted as spelling of 'lenght'"),
    # structure (DTD content models and attribute lists)
    "E-SECTION-ORDER": (E, "quipu sections out of order"),
    "E-CHILD-ORDER": (E, "child element out of content-model order"),
    "E-KNOT-ORDER": (E, "knots must be grouped single, multiple, eight"),
    "E-CHILD-REQUIRED": (E, "required child element missing"),
    "E-CHILD-REPEAT": (E, "child element occurs more often than allowed"),
    "E-CHILD-UNEXPECTED": (E, "element not allowed in this parent"),
    "E-CONTENT": (E, "content not allowed by the element's content model"),
    "E-TEXT-REQUIRED": (E, "required text content is empty"),
    "E-ATTR-REQUIRED": (E, "required attribute missing"),
    "E-ENUM": (E, "attribute value outside its enumeration"),
    "E-ID-SYNTAX": (E, "ID or IDREF value is not an XML name"),
    "E-ID-DUP": (E, "ID value declared more than once"),
    "E-RGB": (E, "color_rgb value is not #rrggbb"),
    # semantics (prose rules)
    "E-LOOPPOS": (E, "loop cord without loop_pos"),
    "E-BADREF": (E, "reference does not resolve to a declaration of the right kind"),
    "E-MIX-ORDER": (E, "mix references a material declared later"),
    "E-MIX-SELF": (E, "material item mixes itself"),
    "E-TOP-ONLY": (E, "attach_pendants on a cord that is not a top cord"),
    "E-RANGE": (E, "lenght/width must be positive, segment pos must be positive"),
    "W-ATTACH-FWD": (W, "attaches references a cord declared later"),
    "W-POS-RANGE": (W, "position lies beyond the parent or cord lenght"),
    "W-SEG-ORDER": (W, "material segment positions not strictly increasing"),
    "W-SEG-LEN": (W, "last material segment does not end at the cord lenght"),
    "W-TRANSCRIPT-NONNUM": (W, "transcription is not an integer"),
    "W-EMPTY-MEDIA": (W, "cord has no material segments"),
    "W-KNOT-NONNUM": (W, "knot content is not a non-negative integer"),
    # other operations
    "E-MODEL-INVARIANT": (E, "document violates a model invariant"),
    "E-EMPTY": (E, "document has no maincords to draw"),
}

PARSE_CODES = frozenset(
    ["E-IO", "E-UTF8", "E-XML-SYNTAX", "E-XML-ENTITY", "E-ROOT", "E-DEPTH", "E-NUM",
     "E-UNKNOWN-ELEM", "W-UNKNOWN-ATTR", "W-PROLOG", "I-LENGTH-ALIAS"]
)

#: warnings that strict validation reports as errors
STRICT_UPGRADES = frozenset(["W-PROLOG", "W-SEG-LEN", "W-POS-RANGE", "W-ATTACH-FWD"])


class SourceLocation(NamedTuple):
    # a NamedTuple: one is built per parsed element, so construction cost matters
    line: int
    column: int
    byte_offset: int
    file: str | None = None

    def __str__(self) -> str:
        prefix = f"{self.file}:" if self.file else ""
        return f"{prefix}{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: Severity
    message: str
    location: SourceLocation | None = None
    subject: str | None = None

    def __post_init__(self) -> None:
        if self.code not in CODES:
            raise ValueError(f"unknown diagnostic code {self.code!r}")
        if not self.message:
            raise ValueError("diagnostic message must not be empty")

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def upgraded(self) -> Diagnostic:
        return replace(self, severity=Severity.ERROR)

    def with_file(self, file: str) -> Diagnostic:
        if self.location is None:
            return self
        return replace(self, location=self.location._replace(file=file))

    def sort_key(self) -> tuple:
        loc = self.location
        if loc is None:
            return (1, 0, 0, self.code)
        return (0, loc.line, loc.column, self.code)

    def to_dict(self) -> dict:
        loc = self.location
        return {
            "code": self.code,
            "severity": self.severity.value,
            "message": self.message,
            "line": loc.line if loc else None,
            "column": loc.column if loc else None,
            "subject": self.subject,
        }

    def __str__(self) -> str:
        where = f"{self.location}: " if self.location else ""
        about = f" [{self.subject}]" if self.subject else ""
        return f"{where}{self.severity.value} {self.code} {self.message}{about}"


def diag(code: str, message: str, location: SourceLocation | None = None,
         subject: str | None = None) -> Diagnostic:
    """Build a diagnostic with the code's default severity."""
    return Diagnostic(code, CODES[code][0], message, location, subject)


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple[Diagnostic, ...] = field(default_factory=tuple)

    @property
    def error_count(self) -> int:
        return sum(1 for d in self.diagnostics if d.severity is Severity.ERROR)

    @property
    def warning_count(self) -> int:
        return sum(1 for d in self.diagnostics if d.severity is Severity.WARNING)

    @property
    def info_count(self) -> int:
        return sum(1 for d in self.diagnostics if d.severity is Severity.INFO)

    @property
    def ok(self) -> bool:
        return self.error_count == 0

    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]

    def summary(self) -> str:
        return (f"{self.error_count} errors, {self.warning_count} warnings, "
                f"{self.info_count} info")

    def to_dict(self) -> dict:
        return {
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "error_count": self.error_count,
            "warning_count": self.warning_count,
            "info_count": self.info_count,
        }


class QdfError(Exception):
    """Raised by operations that cannot return diagnostics."""

    def __init__(self, code: str, message: str,
                 diagnostics: tuple[Diagnostic, ...] = ()) -> None:
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.diagnostics = diagnostics
