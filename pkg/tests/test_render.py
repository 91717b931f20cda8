import re
import xml.etree.ElementTree as ET
from decimal import Decimal

import pytest

from generators import minimal_document, random_document
from qdf import QdfError, parse, render_svg, render_text, stats
from qdf.analysis import MM_PER_UNIT
from qdf.model import (
    CatalogHeader, Cord, CordType, Document, MainCord, MaterialItem, MaterialSegment, MetricUnit,
)

NS = {"svg": "http://www.w3.org/2000/svg"}


def test_text_example(example_doc):
    lines = render_text(example_doc).splitlines()
    assert len(lines) == 7
    assert lines[0].startswith("maincord-1 maincord 600mm dir=Z")
    x1 = lines[1]
    for part in ("X1", "pendant", "415mm", "3 single", "=30"):
        assert part in x1
    assert lines[2].startswith("    X1s1 ")
    assert "loop_pos=67" in lines[5]
    assert "2 multiple" in lines[6] and "=10" in lines[6]


def test_text_empty():
    lines = render_text(minimal_document()).splitlines()
    assert lines == ["quipu MIN1 (minimal)", "(no maincords)"]


@pytest.mark.parametrize("seed", range(15))
def test_text_line_count(seed):
    doc, _ = random_document(seed)
    if not doc.maincords:
        return
    assert len(render_text(doc).splitlines()) == len(doc.maincords) + stats(doc).cord_count


def _svg(doc):
    return ET.fromstring(render_svg(doc).encode())


def _glyphs(root):
    return [e for e in root.iter() if "knot" in (e.get("class") or "").split()]


def test_svg_example(example_doc):
    root = _svg(example_doc)
    cord_lines = root.findall(".//svg:line[@class='cord']", NS)
    assert len(cord_lines) == 6
    labels = [t.text for t in root.findall(".//svg:text[@class='label']", NS)]
    assert sorted(labels) == ["X1", "X1s1", "X2", "X2s1", "X3", "X3s1"]
    kinds = sorted(g.get("class") for g in _glyphs(root))
    assert kinds == ["knot multiple"] * 2 + ["knot single"] * 4


def test_svg_loop_returns_to_loop_pos(example_doc):
    root = _svg(example_doc)
    (arc,) = root.findall(".//svg:path[@class='loop-return']", NS)
    end = arc.get("d").split()[-1]
    assert end == "67,0"  # back on the maincord at loop_pos


def test_svg_minimal_pendant():
    doc = Document(
        CatalogHeader("s", ("C",)), (MaterialItem("M", "d"),), MetricUnit.MM,
        (MainCord(Decimal(100), (Cord("P", Decimal(50), Decimal(10), CordType.PENDANT,
                                      media=(MaterialSegment("M", Decimal(50)),)),)),),
    )
    root = _svg(doc)
    assert len(root.findall(".//svg:line", NS)) == 2
    assert _glyphs(root) == []


def test_svg_empty_is_an_error():
    with pytest.raises(QdfError) as info:
        render_svg(minimal_document())
    assert info.value.code == "E-EMPTY"


def test_svg_colors(example_doc):
    text = render_svg(example_doc)
    assert "#9e9e9e" in text and "<title>ISCC-NBS LC</title>" in text


def test_svg_deterministic(example_doc):
    assert render_svg(example_doc) == render_svg(example_doc)
    assert render_text(example_doc) == render_text(example_doc)


def _centre(elem):
    nums = [float(v) for v in re.findall(r"-?\d+(?:\.\d+)?", elem.get("points") or elem.get("d") or "")]
    if elem.tag.endswith("circle"):
        return float(elem.get("cy"))
    ys = nums[1::2]
    return sum(ys) / len(ys)


def _draw_order(doc):
    out = []

    def walk(cord):
        out.append(cord)
        for child in sorted(cord.children, key=lambda c: c.pos):
            walk(child)

    for main in doc.maincords:
        for cord in sorted(main.cords, key=lambda c: c.pos):
            walk(cord)
    return out


@pytest.mark.parametrize("seed", range(25))
def test_svg_geometry(seed):
    doc, _ = random_document(seed)
    if not doc.maincords:
        return
    root = _svg(doc)
    groups = root.findall(".//svg:g[@class='cord']", NS)
    cords = _draw_order(doc)
    assert len(groups) == len(cords)
    assert len(_glyphs(root)) == stats(doc).knot_count
    scale = float(MM_PER_UNIT[doc.metric_unit])
    for group, cord in zip(groups, cords):
        line = group.find("svg:line[@class='cord']", NS)
        y1, y2 = float(line.get("y1")), float(line.get("y2"))
        extent = y2 - y1
        assert abs(abs(extent) - float(cord.lenght) * scale) <= 0.5
        glyphs = [e for e in group if "knot" in (e.get("class") or "")]
        for glyph, knot in zip(glyphs, cord.knots):
            along = min(float(knot.pos) / float(cord.lenght), 1.0)
            assert abs(_centre(glyph) - (y1 + along * extent)) <= 0.5


def test_svg_well_formed_with_awkward_labels(example_bytes):
    doc = parse(example_bytes.replace(b"IZ001", b"A&amp;B&lt;C")).document
    ET.fromstring(render_svg(doc).encode())


def test_svg_knot_beyond_end_is_clamped(example_bytes):
    doc = parse(example_bytes.replace(b'<single pos="425"', b'<single pos="900"')).document
    root = _svg(doc)
    for group in root.findall(".//svg:g[@class='cord']", NS):
        if group.find("svg:text", NS).text == "X1s1":
            line = group.find("svg:line", NS)
            (glyph,) = [e for e in group if "knot" in (e.get("class") or "")]
            assert abs(_centre(glyph) - float(line.get("y2"))) <= 0.5
            break
    else:
        pytest.fail("X1s1 not drawn")
