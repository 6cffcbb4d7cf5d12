import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import grounding_violations, kinds_for, random_case, total_expansions
from rground import relalg as R
from rground.grounder import G, TU, UF, CountNotFinite, Grounder, InfiniteV, Residual
from rground.relalg import Relation
from rground.terms import (
    BOOL,
    FALSE,
    INT,
    TRUE,
    And,
    App,
    Compare,
    Count,
    Forall,
    FunSym,
    Interpretation,
    Not,
    PartialStructure,
    Sort,
    Var,
    num,
)

COLOR = Sort("Color")
EDGE = FunSym("edge", (INT, INT), BOOL)
COLOR_OF = FunSym("colorOf", (INT,), COLOR)
A = PartialStructure({COLOR: ()}, {EDGE: Interpretation({(num(1), num(2)): TRUE, (num(2), num(3)): TRUE}, FALSE)})
x, y = Var("x", INT), Var("y", INT)
V = Relation(("x", "y"), {(num(1), num(2)), (num(45), num(28))})
EDGE_XY = App(EDGE, (x, y))
SAME = Compare("=", App(COLOR_OF, (x,)), App(COLOR_OF, (y,)))
PHI = Forall((x, y), Not(And((EDGE_XY, SAME))))


def cells(gr):
    return {tuple(r) for r in gr.relation.rows}


def test_predicate_tu_and_uf():
    g = Grounder(A)
    assert cells(g.ground(EDGE_XY, TU, V)) == {(num(1), num(2), TRUE)}
    assert cells(g.ground(EDGE_XY, UF, V)) == {(num(45), num(28), FALSE)}


def test_function_g_constructs():
    out = Grounder(A).ground(App(COLOR_OF, (x,)), G, V).groundings()
    assert out == {(num(1), num(2)): App(COLOR_OF, (num(1),)),
                   (num(45), num(28)): App(COLOR_OF, (num(45),))}


def test_negation_over_w():
    W = Relation(("x", "y"), {(num(1), num(2)), (num(2), num(3))})
    out = Grounder(A).ground(Not(And((EDGE_XY, SAME))), UF, W).groundings()
    assert out == {(num(1), num(2)): Not(Compare("=", App(COLOR_OF, (num(1),)), App(COLOR_OF, (num(2),)))),
                   (num(2), num(3)): Not(Compare("=", App(COLOR_OF, (num(2),)), App(COLOR_OF, (num(3),))))}


def test_identifiers():
    g = Grounder(A)
    assert g.ground(TRUE, UF, V).relation.rows == frozenset()
    assert cells(g.ground(num(5), G, V)) == {(num(1), num(2), num(5)), (num(45), num(28), num(5))}


def test_xgens():
    g = Grounder(A)
    assert g.xgen(EDGE_XY, TU).relation.rows == {(num(1), num(2)), (num(2), num(3))}
    same = g.xgen(SAME, TU).relation
    assert not same.is_finite() and len(same) == 1
    assert g.xgen(And((EDGE_XY, SAME)), TU).relation.rows == {(num(1), num(2)), (num(2), num(3))}
    assert g.xgen(TRUE, UF).relation.rows == frozenset()


def test_sentences():
    g = Grounder(A)
    out = g.ground_sentence(PHI)
    assert isinstance(out, And) and set(out.args) == {
        Not(Compare("=", App(COLOR_OF, (num(1),)), App(COLOR_OF, (num(2),)))),
        Not(Compare("=", App(COLOR_OF, (num(2),)), App(COLOR_OF, (num(3),))))}
    assert g.ground_sentence(Forall((x,), Compare("=", x, x))) == TRUE
    assert g.ground_sentence(FALSE) == FALSE
    count = Compare("=", Count((x, y), EDGE_XY), num(2))
    assert g.ground_sentence(count) == TRUE
    assert g.ground_sentence(Compare("=", Count((x, y), EDGE_XY), num(3))) == FALSE


def test_residual_for_uninterpreted_infinite_quantifier():
    p = FunSym("p", (INT,), BOOL)
    out = Grounder(A).ground_sentence(Forall((x,), App(p, (x,))))
    assert isinstance(out, Residual) and out.term == Forall((x,), App(p, (x,)))


def test_count_over_open_infinite_body_fails():
    p = FunSym("p", (INT,), BOOL)
    with pytest.raises(CountNotFinite):
        Grounder(A).ground_sentence(Compare("=", Count((x,), App(p, (x,))), num(1)))


def test_boolean_g_needs_finite_v():
    allx = R.all_valuations([x], A)
    with pytest.raises(InfiniteV):
        Grounder(A).ground(Forall((y,), EDGE_XY), G, allx)


def test_rule_counters():
    g = Grounder(A)
    g.ground_sentence(PHI)
    assert g.stats["1.8"] == 1 and g.stats["3.4"] >= 1 and g.stats["rows"] > 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_random_groundings_satisfy_conditions(seed):
    structure, term, V_ = random_case(seed)
    exps = total_expansions(structure, [term])
    gr = Grounder(structure)
    for kind in kinds_for(term):
        assert grounding_violations(gr, structure, term, kind, V_, exps) == []
