import pytest

from rground.interp import (
    InfiniteTU,
    UnknownSort,
    function_relation,
    predicate_tu_relation,
    sort_relation,
)
from rground.terms import (
    BOOL,
    FALSE,
    INT,
    TRUE,
    App,
    FunSym,
    Id,
    Interpretation,
    PartialStructure,
    Sort,
    num,
)

D = Sort("D")
D1, D2 = Id("d1", D), Id("d2", D)
COLOR = Sort("Color")
RED, GREEN = Id("red", COLOR), Id("green", COLOR)
A = PartialStructure({D: (D1, D2), COLOR: (RED, GREEN)})


def test_sort_relations():
    assert sort_relation(BOOL, A).relation.rows == {(TRUE,), (FALSE,)}
    assert sort_relation(COLOR, A).relation.rows == {(RED,), (GREEN,)}
    assert not sort_relation(INT, A).relation.is_finite()
    with pytest.raises(UnknownSort):
        sort_relation(Sort("Nope"), A)


def test_function_relation_uninterpreted_is_constructive():
    col = FunSym("colorOf", (INT,), COLOR)
    view = function_relation(col, A).relation
    assert view.value((num(1),)) == App(col, (num(1),))


def test_function_relation_constant():
    c = FunSym("c", (), INT)
    rel = function_relation(c, PartialStructure({}, {c: Interpretation({(): num(5)})})).relation
    assert rel.rows == {(num(5),)}


def test_function_relation_partial_materialized():
    f = FunSym("f", (D,), D)
    S = PartialStructure(A.universes, {f: Interpretation({(D1,): D2})})
    m = function_relation(f, S).relation.materialize(S)
    assert m.rows == {(D1, D2), (D2, App(f, (D2,)))}


def test_predicate_tu_from_atoms():
    edge = FunSym("edge", (INT, INT), BOOL)
    S = PartialStructure({}, {edge: Interpretation({(num(1), num(2)): TRUE, (num(2), num(3)): TRUE}, FALSE)})
    assert predicate_tu_relation(edge, S).relation.rows == {
        (num(1), num(2), TRUE), (num(2), num(3), TRUE)}
    S0 = PartialStructure({}, {edge: Interpretation({}, FALSE)})
    assert predicate_tu_relation(edge, S0).relation.rows == frozenset()


def test_predicate_tu_partial_enumerated():
    p = FunSym("p", (D, D), BOOL)
    S = PartialStructure(A.universes, {p: Interpretation(
        {(D1, D1): TRUE, (D2, D2): FALSE, (D2, D1): FALSE})})
    # (d1,d2) is unknown, every other point is listed
    assert predicate_tu_relation(p, S).relation.rows == {(D1, D1, TRUE), (D1, D2, App(p, (D1, D2)))}


def test_predicate_tu_infinite_open_domain():
    q = FunSym("q", (INT,), BOOL)
    with pytest.raises(InfiniteTU):
        predicate_tu_relation(q, PartialStructure())
