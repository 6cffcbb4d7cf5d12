from helpers import EXAMPLES, INTRO_GROUNDED
from rground.emitter import emit, emit_script, interpretation_assertions
from rground.frontend import parse
from rground.pipeline import ground_text
from rground.terms import (
    BOOL,
    FALSE,
    INT,
    TRUE,
    App,
    Forall,
    FunSym,
    Id,
    Interpretation,
    PartialStructure,
    Sort,
    evaluate,
    num,
)


def test_intro_output_layout():
    text = ground_text((EXAMPLES / "intro_x_set.smt2").read_text()).text
    lines = text.splitlines()
    assert lines[0].startswith("(declare-datatype Color")
    assert "(declare-fun colorOf (Int) Color)" in lines
    assert INTRO_GROUNDED in lines
    assert lines[-2:] == ["(check-sat)", "(get-model)"]
    # edge is fully interpreted and no longer referenced
    assert "edge" not in text and "x-" not in text


def test_all_true_groundings_keep_declarations_and_trailer():
    s = parse("(set-logic ALL)(declare-fun p (Int) Bool)(assert true)(check-sat)")
    out = emit_script(s, [TRUE])
    assert out.assertions == []
    assert out.preamble == ["(set-logic ALL)"] and out.trailer == ["(check-sat)"]


def test_false_grounding_is_asserted():
    s = parse("(assert false)(check-sat)")
    assert "(assert false)" in emit(s, [FALSE])


def test_residual_reparses():
    res = ground_text((EXAMPLES / "residual.smt2").read_text())
    (a,) = parse(res.text).assertions
    assert isinstance(a, Forall)


def test_interpretation_assertions_finite_and_infinite():
    D = Sort("D")
    ids = (Id("a", D), Id("b", D), Id("c", D))
    f = FunSym("f", (D,), D)
    S = PartialStructure({D: ids}, {f: Interpretation({(ids[0],): ids[1]}, ids[2], frozenset({(ids[1],)}))})
    facts = interpretation_assertions(f, S)
    # point a, default for c; b stays open
    assert len(facts) == 2
    g = FunSym("g", (INT,), BOOL)
    S2 = PartialStructure({}, {g: Interpretation({(num(1),): TRUE}, FALSE)})
    (point, rest) = interpretation_assertions(g, S2)
    assert point == App(g, (num(1),)) and isinstance(rest, Forall)
    # the quantified default holds in a structure agreeing with the interpretation
    total = PartialStructure({}, {g: Interpretation({(num(1),): TRUE}, FALSE)})
    assert evaluate(rest.body, total, {"a1": num(5)}) == TRUE
    assert evaluate(rest.body, total, {"a1": num(1)}) == TRUE


def test_partially_interpreted_symbols_keep_their_facts():
    text = ("(declare-datatype D ((a) (b)))(declare-fun f (D) D)"
            "(x-interpret-fun f (x-mapping ((a) b)))"
            "(assert (forall ((x D)) (= (f x) b)))(check-sat)")
    out = ground_text(text).text
    assert "(assert (= (f b) b))" in out
