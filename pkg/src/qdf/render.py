"""Text tree and SVG renderings of a document's cord structure."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal
from xml.sax.saxutils import escape

from .analysis import MM_PER_UNIT, decode_cord_value
from .codec import format_number
from .diagnostics import QdfError
from .model import Cord, CordType, Document, KnotKind, iterate_cords

# --------------------------------------------------------------------------- text


def _knot_summary(cord: Cord) -> str:
    counts = Counter(k.kind for k in cord.knots)
    return ", ".join(f"{counts[kind]} {kind.value}" for kind in KnotKind if counts[kind])


def _len(value: Decimal | None, unit: str) -> str:
    return "?" if value is None else f"{format_number(value)}{unit}"


def render_text(document: Document) -> str:
    """Indented tree, one line per maincord and per cord."""
    unit = document.metric_unit.value if document.metric_unit else ""
    lines = []
    if not document.maincords:
        header = document.header
        codes = " ".join(header.codenames) if header else ""
        source = f" ({header.source})" if header and header.source else ""
        lines.append(f"quipu {codes}{source}".rstrip())
        lines.append("(no maincords)")
        return "\n".join(lines) + "\n"
    visits = list(iterate_cords(document))
    for position, main in enumerate(document.maincords):
        parts = [document.maincord_key(position), "maincord", _len(main.lenght, unit),
                 f"dir={main.dir.value}"]
        if main.material:
            parts.append(f"material={main.material}")
        lines.append(" ".join(parts))
        for visit in visits:
            if visit.maincord != position:
                continue
            cord = visit.cord
            parts = [
                cord.index or "?",
                cord.cord_type.value if cord.cord_type else "?",
                _len(cord.lenght, unit),
                f"pos={format_number(cord.pos) if cord.pos is not None else '?'}",
                f"dir={cord.dir.value}",
            ]
            if cord.cord_type is CordType.LOOP and cord.loop_pos is not None:
                parts.append(f"loop_pos={format_number(cord.loop_pos)}")
            if cord.knots:
                value = decode_cord_value(cord)
                parts.append(f"knots: {_knot_summary(cord)}")
                parts.append(f"={value if value is not None else '?'}")
            lines.append("  " * visit.depth + " ".join(parts))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- svg

MARGIN = 20.0
MIN_SPACING = 8.0
NEUTRAL = "#9e9e9e"
KNOT_SIZE = 2.5
LABEL_CHAR_WIDTH = 3.5
# keeps absurd magnitudes finite in the output
MAX_EXTENT = 1e9


def _f(x: float) -> str:
    text = f"{x:.2f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


@dataclass
class _Bounds:
    min_x: float = 0.0
    min_y: float = 0.0
    max_x: float = 0.0
    max_y: float = 0.0

    def add(self, x: float, y: float) -> None:
        self.min_x = min(self.min_x, x)
        self.max_x = max(self.max_x, x)
        self.min_y = min(self.min_y, y)
        self.max_y = max(self.max_y, y)


@dataclass
class _Band:
    """Markup for one maincord, laid out with the maincord's start at (0, 0)."""

    parts: list[str] = field(default_factory=list)
    bounds: _Bounds = field(default_factory=_Bounds)


class _SvgLayout:
    def __init__(self, document: Document) -> None:
        self.document = document
        unit = document.metric_unit
        self.scale = float(MM_PER_UNIT[unit]) if unit is not None else 1.0
        self.colors: dict[str, tuple[str, str | None]] = {}
        for item in document.media_index:
            if item.label is None:
                continue
            if item.color_rgb is not None and item.color_rgb.is_valid:
                self.colors[item.label] = (item.color_rgb.value.lower(), None)
            else:
                self.colors[item.label] = (NEUTRAL, item.color_iccnbs)

    def mm(self, value: Decimal | None) -> float:
        if value is None:
            return 0.0
        return min(float(value) * self.scale, MAX_EXTENT)

    def band(self, position: int) -> _Band:
        main = self.document.maincords[position]
        band = _Band()
        length = self.mm(main.lenght)
        band.bounds.add(length, 0)
        band.parts.append(f'<line class="maincord" x1="0" y1="0" x2="{_f(length)}" y2="0" '
                          f'stroke="#333333" stroke-width="3"/>')
        label = self.document.maincord_key(position)
        band.parts.append(f'<text class="label maincord-label" x="0" y="-6" font-size="7">'
                          f'{escape(label)}</text>')
        band.bounds.add(0, -14)
        band.bounds.add(len(label) * LABEL_CHAR_WIDTH, 0)
        last_x: float | None = None
        for cord in sorted(main.cords, key=lambda c: self.mm(c.pos)):
            true_x = self.mm(cord.pos)
            x = true_x if last_x is None else max(true_x, last_x + MIN_SPACING)
            last_x = x
            sign = -1.0 if cord.cord_type is CordType.TOP else 1.0
            self.cord(cord, band, x, 0.0, sign, true_x=true_x, parent=None)
        return band

    def cord(self, cord: Cord, band: _Band, x: float, y: float, sign: float,
             true_x: float, parent: tuple[float, float, float, float] | None) -> None:
        """Draw ``cord`` hanging from (x, y); ``parent`` is (x, y0, sign, length) of its parent."""
        out = ['<g class="cord">']
        length = self.mm(cord.lenght)
        end_y = y + sign * length
        if abs(true_x - x) > 1e-9 and parent is None:
            out.append(f'<path class="leader" d="M {_f(true_x)},{_f(y)} Q {_f((true_x + x) / 2)},'
                       f'{_f(y + sign * 6)} {_f(x)},{_f(y)}" fill="none" stroke="#666666" '
                       f'stroke-dasharray="2,2" stroke-width="0.5"/>')
        start = 0.0
        for seg in cord.media:
            stop = min(self.mm(seg.pos), length)
            if stop <= start:
                continue
            color, title = self.colors.get(seg.material or "", (NEUTRAL, None))
            body = f"<title>ISCC-NBS {escape(title)}</title>" if title else ""
            out.append(f'<path class="segment" d="M {_f(x)},{_f(y + sign * start)} L {_f(x)},'
                       f'{_f(y + sign * stop)}" stroke="{color}" stroke-width="3">{body}</path>')
            start = stop
        out.append(f'<line class="cord" x1="{_f(x)}" y1="{_f(y)}" x2="{_f(x)}" y2="{_f(end_y)}" '
                   f'stroke="#333333" stroke-width="1"/>')
        band.bounds.add(x, y)
        band.bounds.add(x, end_y)
        for knot in cord.knots:
            along = min(self.mm(knot.pos), length)
            out.append(self.glyph(knot.kind, x, y + sign * along))
        if cord.cord_type is CordType.LOOP and cord.loop_pos is not None:
            if parent is None:
                rx, ry = self.mm(cord.loop_pos), 0.0
            else:
                px, py, psign, plen = parent
                rx, ry = px, py + psign * min(self.mm(cord.loop_pos), plen)
            out.append(f'<path class="loop-return" d="M {_f(x)},{_f(end_y)} Q {_f(rx)},{_f(end_y)} '
                       f'{_f(rx)},{_f(ry)}" fill="none" stroke="#333333" stroke-width="1"/>')
            band.bounds.add(rx, ry)
        label = cord.index or "?"
        ly = end_y + sign * 8
        out.append(f'<text class="label" x="{_f(x + 2)}" y="{_f(ly)}" font-size="6">'
                   f'{escape(label)}</text>')
        band.bounds.add(x + 2 + len(label) * LABEL_CHAR_WIDTH, ly + sign * 2)
        out.append("</g>")
        band.parts.append("".join(out))

        last_x: float | None = None
        for child in sorted(cord.children, key=lambda c: self.mm(c.pos)):
            along = min(self.mm(child.pos), length)
            ay = y + sign * along
            cx = x + MIN_SPACING if last_x is None else last_x + MIN_SPACING
            last_x = cx
            band.parts.append(f'<path class="branch" d="M {_f(x)},{_f(ay)} L {_f(cx)},{_f(ay)}" '
                              f'stroke="#333333" stroke-width="0.5"/>')
            self.cord(child, band, cx, ay, sign, true_x=cx, parent=(x, y, sign, length))

    @staticmethod
    def glyph(kind: KnotKind, x: float, y: float) -> str:
        s = KNOT_SIZE
        if kind is KnotKind.SINGLE:
            return (f'<circle class="knot single" cx="{_f(x)}" cy="{_f(y)}" r="{_f(s)}" '
                    f'fill="#ffffff" stroke="#000000" stroke-width="0.7"/>')
        if kind is KnotKind.MULTIPLE:
            pts = f"{_f(x)},{_f(y - s * 1.6)} {_f(x + s)},{_f(y)} {_f(x)},{_f(y + s * 1.6)} {_f(x - s)},{_f(y)}"
            return (f'<polygon class="knot multiple" points="{pts}" fill="#ffffff" '
                    f'stroke="#000000" stroke-width="0.7"/>')
        return (f'<path class="knot eight" d="M {_f(x - s)},{_f(y - s)} L {_f(x + s)},{_f(y + s)} '
                f'M {_f(x - s)},{_f(y + s)} L {_f(x + s)},{_f(y - s)}" stroke="#000000" '
                f'stroke-width="0.9"/>')


def render_svg(document: Document) -> str:
    """SVG 1.1 drawing, one document unit in mm = one user unit."""
    if not document.maincords:
        raise QdfError("E-EMPTY", "document has no maincords to draw")
    layout = _SvgLayout(document)
    bands = [layout.band(i) for i in range(len(document.maincords))]
    width = max(b.bounds.max_x - b.bounds.min_x for b in bands) + 2 * MARGIN
    body = []
    cursor = MARGIN
    for band in bands:
        b = band.bounds
        tx, ty = MARGIN - b.min_x, cursor - b.min_y
        body.append(f'<g class="quipu-maincord" transform="translate({_f(tx)},{_f(ty)})">')
        body.extend(band.parts)
        body.append("</g>")
        cursor += (b.max_y - b.min_y) + MARGIN
    height = cursor
    title = "quipu"
    if document.header is not None and document.header.codenames:
        title += " " + " ".join(document.header.codenames)
    head = (f'<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(width)}" '
            f'height="{_f(height)}" viewBox="0 0 {_f(width)} {_f(height)}">\n'
            f'<title>{escape(title)}</title>\n'
            f'<rect x="0" y="0" width="{_f(width)}" height="{_f(height)}" fill="#ffffff"/>\n')
    return head + "\n".join(body) + "\n</svg>\n"


__all__ = ["render_svg", "render_text"]
