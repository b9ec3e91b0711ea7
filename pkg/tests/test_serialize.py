import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgkit.errors import ParseError, ReplayError
from pgkit.field import field_of_order
from pgkit.generators import corpus
from pgkit.geometry import pg
from pgkit.matroid import closure, epsilon
from pgkit.serialize import ConstructionDocument, load, matrix_document, parse, pg_document, replay, serialize

CORPUS = corpus(0, 150)
PG22 = b'{"version":1,"field":{"p":2,"e":1,"modulus":[0,1]},"base":{"pg":{"n":3}},"ops":[]}'


def test_pg_document_replays():
    M = load(PG22)
    assert epsilon(M) == 7 and M.r == 3


def test_canonical_form():
    canonical = b'{"base":{"pg":{"n":3}},"field":{"e":1,"modulus":[0,1],"p":2},"ops":[],"version":1}\n'
    assert serialize(parse(PG22)) == canonical
    assert serialize(parse(canonical)) == canonical
    doc = pg_document(field_of_order(2), 3, [("delete", (5, 2))])
    assert json.loads(serialize(doc))["ops"] == [{"delete": {"set": [2, 5]}}]


def test_singleproj_instance_round_trip(pg32):
    L = closure(pg32.handle, [0, 1]).sorted()
    doc = pg_document(field_of_order(2), 4, [("extend", tuple(L)), ("contract", (15,))])
    data = serialize(doc)
    assert serialize(parse(data)) == data
    assert epsilon(load(data)) == 13


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(CORPUS))
def test_corpus_round_trip(entry):
    data = serialize(entry.doc)
    again = parse(data)
    assert serialize(again) == data
    A, B = replay(entry.doc), replay(again)
    assert A.ground == B.ground and A.r == B.r and epsilon(A) == epsilon(B)


def test_matrix_entries_are_coefficient_lists():
    F4 = field_of_order(4)
    M = pg(2, F4).handle
    obj = json.loads(serialize(matrix_document(M)))
    entries = obj["base"]["matrix"]["entries"]
    assert all(len(c) == 2 and all(x in (0, 1) for x in c) for c in entries)
    assert obj["field"] == {"p": 2, "e": 2, "modulus": [1, 1, 1]}
    assert epsilon(load(serialize(matrix_document(M)))) == 5


def test_extend_on_non_flat_names_the_step():
    doc = pg_document(field_of_order(2), 3, [("delete", (6,)), ("extend", (0, 1))])
    with pytest.raises(ReplayError) as info:
        replay(doc)
    assert info.value.step == 1


def test_bad_base_names_base():
    doc = ConstructionDocument(field_of_order(2), ("pg", 12))
    with pytest.raises(ReplayError) as info:
        replay(doc)
    assert info.value.step == "base"


@pytest.mark.parametrize(
    "text,path",
    [
        ('{"version":1,"field":{"p":2,"e":1,"modulus":[0,1]},"base":{"pg":{"n":3}},"ops":[],"extra":0}', "$.extra"),
        ('{"version":1,"field":{"p":2,"e":1,"modulus":[0,1],"q":2},"base":{"pg":{"n":3}},"ops":[]}', "$.field.q"),
        ('{"version":1,"field":{"p":2,"e":1,"modulus":[0,1]},"base":{"pg":{"n":3.0}},"ops":[]}', "$"),
        ('{"version":1,"field":{"p":2,"e":1,"modulus":[0,1]},"base":{"pg":{"n":true}},"ops":[]}', "$.base.pg.n"),
        ('{"version":2,"field":{"p":2,"e":1,"modulus":[0,1]},"base":{"pg":{"n":3}},"ops":[]}', "$.version"),
        ('{"version":1,"field":{"p":2,"e":2,"modulus":[1,0,1]},"base":{"pg":{"n":3}},"ops":[]}', "$.field"),
        ('{"version":1,"field":{"p":2,"e":1,"modulus":[0,1]},"base":{"pg":{"n":3}},"ops":[{"extend":{"flat":[1,1]}}]}', "$.ops[0].extend.flat"),
        ('{"version":1,"field":{"p":2,"e":1,"modulus":[0,1]},"base":{"pg":{"n":3}},"ops":[{"shrink":{}}]}', "$.ops[0].shrink"),
        ('{"version":1,"field":{"p":2,"e":1,"modulus":[0,1]},"base":{"matrix":{"rows":1,"cols":2,"entries":[[1]]}},"ops":[]}', "$.base.matrix.entries"),
        ('{"version":1,"field":{"p":2,"e":1,"modulus":[0,1]},"base":{"pg":{"n":3}}}', "$"),
    ],
)
def test_strict_parse_errors(text, path):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.path == path


def test_parse_error_reports_line():
    text = '{\n "version": 1,\n "field": {"p": 2, "e": 1, "modulus": [0, 1]},\n "base": {"pg": {"n": 3}},\n "ops": [],\n "bogus": 1\n}'
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.line == 6
    with pytest.raises(ParseError) as info:
        parse('{"version": 1,\n')
    assert info.value.line == 2
    with pytest.raises(ParseError):
        parse(b"\xff\xfe")
