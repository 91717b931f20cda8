import random
import re
from dataclasses import replace
from decimal import Decimal

import pytest
from hypothesis import given, settings, strategies as st

from generators import minimal_document, random_document
from qdf import QdfError, canonicalize, parse, serialize
from qdf.codec import format_number
from qdf.model import Knot, KnotKind, find_cord


def test_example_round_trip(example_doc):
    assert parse(serialize(example_doc)).document == example_doc


def test_example_canonical_text(example_doc):
    text = serialize(example_doc)
    assert text.startswith('<?xml version="1.0"?>\n<!DOCTYPE quipu SYSTEM "qdf.dtd">\n<quipu>\n')
    assert text.endswith("</quipu>\n")
    assert '<maincord dir="Z" lenght="600" material="YB:LC">' in text
    assert '<cord index="X1" lenght="415" pos="0" dir="S" type="pendant" finish="knotted">' in text
    # defaults are omitted
    assert 'dir="U"' not in text and 'attach="U"' not in text
    assert "<!--" not in text
    assert "<color_iccnbs value=\"LC\"/>" in text


def test_minimal_emission():
    text = serialize(minimal_document())
    tags = re.findall(r"<(\w+)", text)
    assert "maincord" not in tags
    assert [t for t in tags if t in ("about", "media_index", "metric_unit")] == [
        "about", "media_index", "metric_unit"]


def test_canonicalize_fixpoint(example_bytes):
    once = canonicalize(example_bytes)
    assert canonicalize(once) == once


def _shuffle_attributes(text: str, rng: random.Random) -> str:
    def shuffle(match):
        attrs = re.findall(r'\s+[\w:]+="[^"]*"', match.group(2))
        rng.shuffle(attrs)
        return f"<{match.group(1)}{''.join(attrs)}{match.group(3)}"

    return re.sub(r'<(\w+)((?:\s+[\w:]+="[^"]*")+)\s*(/?>)', shuffle, text)


@pytest.mark.parametrize("seed", range(5))
def test_attribute_order_is_irrelevant(example_bytes, seed):
    shuffled = _shuffle_attributes(example_bytes.decode(), random.Random(seed))
    assert canonicalize(shuffled) == canonicalize(example_bytes)


def test_length_spelling_is_normalized(example_bytes):
    out = canonicalize(example_bytes.replace(b"lenght=", b"length="))
    assert "length=" not in out and out == canonicalize(example_bytes)


def test_whitespace_normalized(example_bytes):
    noisy = example_bytes.replace(b"<codename>IZ001</codename>", b"<codename>  IZ001\n </codename>")
    assert canonicalize(noisy) == canonicalize(example_bytes)


@pytest.mark.parametrize("seed", range(200))
def test_generated_round_trip(seed):
    doc, _ = random_document(seed)
    text = serialize(doc)
    again = parse(text).document
    assert again == doc
    assert serialize(again) == text


def test_special_characters_survive(example_doc):
    header = replace(example_doc.header, comment='a < b & "c" > d\n\tend', source="x&y")
    doc = replace(example_doc, header=header)
    back = parse(serialize(doc)).document
    assert back.header.comment == header.comment and back.header.source == "x&y"


def test_knot_runs_split_when_out_of_order(example_doc):
    x1 = find_cord(example_doc, "X1")
    knots = (Knot(KnotKind.EIGHT, Decimal(1), "1"), Knot(KnotKind.SINGLE, Decimal(2), "2"))
    main = example_doc.maincords[0]
    doc = replace(example_doc, maincords=(replace(main, cords=(replace(x1, knots=knots),)
                                                  + main.cords[1:]),))
    text = serialize(doc)
    assert text.count("<knots>") == 4
    back = parse(text)
    assert back.document == doc and "E-KNOT-ORDER" not in [d.code for d in back.diagnostics]


def test_invalid_model_refused(example_doc):
    bad = replace(example_doc, header=replace(example_doc.header, codenames=()))
    with pytest.raises(QdfError) as info:
        serialize(bad)
    assert info.value.code == "E-MODEL-INVARIANT"


def test_canonicalize_fatal():
    with pytest.raises(QdfError) as info:
        canonicalize(b"<quipu>")
    assert info.value.code == "E-XML-SYNTAX"


@pytest.mark.parametrize("text,expected", [
    ("600", "600"), ("600.0", "600"), ("23.62205", "23.62205"), ("0.50", "0.5"),
    ("1E+3", "1000"), ("0", "0"), ("0.00001", "0.00001"),
])
def test_format_number(text, expected):
    assert format_number(Decimal(text)) == expected


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_round_trip_property(seed):
    doc, _ = random_document(seed)
    assert parse(serialize(doc)).document == doc


@settings(max_examples=100, deadline=None)
@given(st.decimals(min_value=0, max_value=10**9, places=5, allow_nan=False, allow_infinity=False))
def test_number_format_round_trip(value):
    assert Decimal(format_number(value)) == value
