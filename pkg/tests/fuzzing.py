"""Deterministic malformed-input corpus built from a seed document."""
from __future__ import annotations

import random

TOKENS = [
    b"<", b">", b"</", b"/>", b"&", b"&amp;", b"&#0;", b"&#x110000;", b"&bogus;", b"]]>",
    b"<!ENTITY e \"x\">", b"<!DOCTYPE q [<!ENTITY e \"x\">]>", b"<?pi x?>", b"<![CDATA[x]]>",
    b"\x00", b"\xff\xfe", b"\xc3", b"\xed\xa0\x80", b"\"", b"'", b"=", b"lenght=\"-1\"",
    b"pos=\"1e9999\"", b"pos=\"9" + b"9" * 5000 + b"\"", b"<cord>", b"<knots>", b"<foo/>",
    b"<single pos=\"1\">99999999999999999999999999</single>", b"<!--", b"-->", b"\r\n", b"\t",
    b"length=\"5\"", b"index=\"X1\"", b"type=\"loop\"", b"<maincord lenght=\"1\">",
]


def _flip(rng: random.Random, data: bytes) -> bytes:
    buf = bytearray(data)
    for _ in range(rng.randint(1, 8)):
        buf[rng.randrange(len(buf))] = rng.randrange(256)
    return bytes(buf)


def _truncate(rng: random.Random, data: bytes) -> bytes:
    return data[: rng.randrange(len(data))]


def _insert(rng: random.Random, data: bytes) -> bytes:
    at = rng.randrange(len(data) + 1)
    return data[:at] + rng.choice(TOKENS) + data[at:]


def _delete(rng: random.Random, data: bytes) -> bytes:
    a = rng.randrange(len(data))
    b = min(len(data), a + rng.randint(1, 200))
    return data[:a] + data[b:]


def _splice(rng: random.Random, data: bytes) -> bytes:
    a, b = sorted(rng.randrange(len(data)) for _ in range(2))
    at = rng.randrange(len(data))
    return data[:at] + data[a:b] + data[at:]


def _deep(rng: random.Random, data: bytes) -> bytes:
    depth = rng.choice([rng.randint(10, 200), rng.randint(200, 3000)])
    if rng.random() < 0.5:
        opener = b'<cord index="D%d" lenght="5" pos="1" type="subsidiary"><media/>'
        body = b"".join(opener % i for i in range(depth)) + b"</cord>" * depth
        return (b'<?xml version="1.0"?><quipu><about><source>s</source><codename>c</codename>'
                b'</about><media_index><material_item label="M"><description>d</description>'
                b'</material_item></media_index><metric_unit type="mm"/><maincord lenght="9">'
                + body + b"</maincord></quipu>")
    tag = rng.choice([b"quipu", b"about", b"x"])
    return b"<" + tag + b">" + b"<a>" * depth + b"</a>" * rng.randint(0, depth)


def _noise(rng: random.Random, data: bytes) -> bytes:
    return bytes(rng.randrange(256) for _ in range(rng.randint(0, 300)))


def _stacked(rng: random.Random, data: bytes) -> bytes:
    for _ in range(rng.randint(2, 5)):
        data = rng.choice([_flip, _insert, _delete, _splice])(rng, data) or b" "
    return data


MUTATORS = [_flip, _truncate, _insert, _delete, _splice, _deep, _noise, _stacked]


def fuzz_inputs(seed: bytes, count: int, rng_seed: int = 0):
    rng = random.Random(rng_seed)
    for n in range(count):
        mutate = MUTATORS[n % len(MUTATORS)]
        yield mutate(rng, seed)
