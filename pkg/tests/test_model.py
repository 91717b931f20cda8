from dataclasses import replace
from decimal import Decimal

import pytest

from generators import minimal_document, nested_document, random_document
from qdf.model import (
    Cord, CordType, Direction, Knot, KnotKind, MaterialItem, check_invariants, count_cords,
    find_cord, iterate_cords, parse_count, parse_int,
)


def test_iterate_example_preorder(example_doc):
    visits = list(iterate_cords(example_doc))
    assert [v.cord.index for v in visits] == ["X1", "X1s1", "X2", "X2s1", "X3", "X3s1"]
    assert [v.depth for v in visits] == [1, 2, 1, 2, 1, 2]
    assert [v.parent for v in visits] == ["maincord-1", "X1", "maincord-1", "X2", "maincord-1", "X3"]


def test_iterate_empty_document():
    assert list(iterate_cords(minimal_document())) == []


def test_iterate_nested_chain():
    visits = list(iterate_cords(nested_document(4)))
    # hand-enumerated pre-order of a single chain
    assert [(v.cord.index, v.depth) for v in visits] == [("L1", 1), ("L2", 2), ("L3", 3), ("L4", 4)]
    assert visits[3].parent_cord.index == "L3"


def _recursive_preorder(doc):
    out = []

    def walk(cord, depth):
        out.append((cord.index, depth))
        for child in cord.children:
            walk(child, depth + 1)

    for main in doc.maincords:
        for cord in main.cords:
            walk(cord, 1)
    return out


@pytest.mark.parametrize("seed", range(30))
def test_iterate_matches_recursive_walk(seed):
    doc, truth = random_document(seed)
    visits = [(v.cord.index, v.depth) for v in iterate_cords(doc)]
    assert visits == _recursive_preorder(doc)
    assert count_cords(doc) == truth.cord_count


def test_find_cord(example_doc):
    x1s1 = find_cord(example_doc, "X1s1")
    assert x1s1.lenght == 425 and x1s1.pos == 50
    assert find_cord(example_doc, "NOPE") is None
    for visit in iterate_cords(example_doc):
        assert find_cord(example_doc, visit.cord.index) is visit.cord


def test_defaults():
    cord = Cord("A", Decimal(1), Decimal(0), CordType.PENDANT)
    assert cord.dir is Direction.U and cord.attach.value == "U" and cord.attach_through is False


def test_counts():
    assert parse_count("10") == 10
    assert parse_count(" 7 ") == 7
    assert parse_count("-3") is None
    assert parse_count("3a") is None
    assert parse_int("-3") == -3
    assert parse_int("x") is None
    assert Knot(KnotKind.SINGLE, Decimal(0), "abc").value is None


def test_huge_count_does_not_raise():
    value = parse_count("9" * 10000)
    assert value is None or value > 0


def test_invariants_clean_on_example(example_doc):
    assert check_invariants(example_doc) == []


def test_invariants_catch_problems(example_doc):
    bad = replace(example_doc, media_index=example_doc.media_index + (MaterialItem("BS", "dup"),))
    assert any("BS" in p for p in check_invariants(bad))
    main = example_doc.maincords[0]
    cords = (replace(main.cords[0], lenght=Decimal(-1)),) + main.cords[1:]
    bad = replace(example_doc, maincords=(replace(main, cords=cords),))
    assert check_invariants(bad)
    bad = replace(example_doc, header=replace(example_doc.header, codenames=()))
    assert check_invariants(bad)


def test_invariant_depth():
    assert check_invariants(nested_document(4), max_depth=3)
    assert check_invariants(nested_document(4), max_depth=4) == []
