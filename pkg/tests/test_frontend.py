import pytest
from hypothesis import given, settings, strategies as st

from helpers import EXAMPLES
from rground.frontend import (
    Assert,
    DefineFun,
    ScriptSyntaxError,
    SortError,
    UndeclaredSymbol,
    UnsupportedCommand,
    XInterpretPred,
    parse,
    parse_term,
    preprocess,
)
from rground.sexpr import Atom, ParseError, SList, read_all
from rground.terms import (
    BOOL,
    FALSE,
    INT,
    TRUE,
    App,
    Compare,
    Count,
    Forall,
    Id,
    Not,
    Var,
    evaluate,
    num,
    subterms,
)


# s-expressions ------------------------------------------------------------------

def test_read_atoms_and_lists():
    (sx,) = read_all('(f |a b| 12 1.5 "say ""hi""" :named)')
    kinds = [a.kind for a in sx.items]
    assert kinds == ["symbol", "symbol", "numeral", "decimal", "string", "keyword"]
    assert sx.items[1].text == "a b"
    assert sx.items[4].text == 'say "hi"'


def test_read_comments_and_locations():
    forms = read_all("; a comment\n(a)\n  (b ; trailing\n c)")
    assert len(forms) == 2 and forms[1].loc.line == 3


@pytest.mark.parametrize("text", ["(a", "a)", '"open'])
def test_read_errors(text):
    with pytest.raises(ParseError):
        read_all(text)


symbols = st.from_regex(r"[a-z][a-z0-9_]{0,6}", fullmatch=True)
exprs = st.recursive(symbols, lambda kids: st.lists(kids, max_size=4), max_leaves=12)


def _show(e):
    return e if isinstance(e, str) else "(" + " ".join(_show(c) for c in e) + ")"


def _plain(sx):
    return sx.text if isinstance(sx, Atom) else [_plain(c) for c in sx.items]


@settings(max_examples=200, deadline=None)
@given(exprs)
def test_read_round_trip(e):
    (sx,) = read_all(_show(e))
    assert _plain(sx) == e


# scripts ------------------------------------------------------------------------

def test_define_fun_script():
    s = parse((EXAMPLES / "intro_define_fun.smt2").read_text())
    assert sum(isinstance(c, DefineFun) for c in s.commands) == 1
    assert len(s.assertions) == 1 and isinstance(s.assertions[0], Forall)


def test_count_assertion_parses():
    s = parse("(declare-fun edge (Int Int) Bool)"
              "(assert (= (x-count ((x Int) (y Int)) (edge x y)) 2))")
    (a,) = s.assertions
    x, y = Var("x", INT), Var("y", INT)
    (edge,) = s.functions.values()
    assert a == Compare("=", Count((x, y), App(edge, (x, y))), num(2))


def test_x_set_and_unknown():
    s = parse("(declare-fun p (Int) Bool)(x-interpret-pred p (x-set (1) (2)) (x-unknown (3)))")
    (cmd,) = [c for c in s.commands if isinstance(c, XInterpretPred)]
    (interp,) = s.interps.values()
    assert interp.lookup((num(1),)) == TRUE
    assert interp.lookup((num(3),)) is None
    assert interp.lookup((num(9),)) == FALSE


def test_x_mapping_with_else():
    s = parse("(declare-datatype C ((r) (g)))(declare-fun f (Int) C)"
              "(x-interpret-fun f (x-mapping ((1) r) ((2) g)) (x-else r))")
    (interp,) = s.interps.values()
    assert interp.default == Id("r", interp.default.sort)


@pytest.mark.parametrize("text,err", [
    ("(push 1)", UnsupportedCommand),
    ("(x-interpret-pred edge (x-set (1 2)))(declare-fun edge (Int Int) Bool)", UndeclaredSymbol),
    ("(declare-fun p (Int) Bool)(assert (p true))", SortError),
    ("(assert (let ((a 1)) (= a 1)))", UnsupportedCommand),
    ("(declare-fun x!1 () Int)", ScriptSyntaxError),
    ("(declare-fun p (Int) Bool)(x-interpret-pred p (x-set (1)))(x-interpret-pred p (x-set (2)))",
     ScriptSyntaxError),
])
def test_script_errors(text, err):
    with pytest.raises(err):
        parse(text)


def test_desugaring():
    s = parse("(declare-fun p (Int) Bool)(declare-fun q (Int) Bool)")
    t = parse_term("(or (p 1) (=> (q 2) (p 3)))", s)
    assert isinstance(t, Not)
    assert evaluate(parse_term("(distinct 1 2 3)", s), s.structure) == TRUE
    assert evaluate(parse_term("(distinct 1 2 1)", s), s.structure) == FALSE
    assert parse_term("(- 4)", s) == num(-4)


def test_macro_inlining_gives_disjunction():
    s = preprocess(parse((EXAMPLES / "intro_define_fun.smt2").read_text()))
    (a,) = s.assertions
    assert not any(isinstance(t, App) and t.sym.name == "edge" for t in subterms(a))
    assert num(1) in set(subterms(a)) and num(2) in set(subterms(a))


def test_macro_inlining_avoids_capture():
    s = preprocess(parse(
        "(declare-datatype D ((a) (b)))(declare-fun p (D D) Bool)"
        "(define-fun m ((u D)) Bool (forall ((v D)) (p u v)))"
        "(assert (forall ((v D)) (m v)))"))
    (a,) = s.assertions
    inner = [t for t in subterms(a) if isinstance(t, App) and t.sym.name == "p"]
    assert all(t.args[0] != t.args[1] for t in inner)


def test_no_definitions_unchanged():
    text = "(declare-fun p (Int) Bool)(assert (p 1))(check-sat)"
    s = parse(text)
    assert preprocess(s).assertions == s.assertions


@pytest.mark.parametrize("name", ["intro_define_fun.smt2", "intro_x_set.smt2", "count.smt2", "residual.smt2"])
def test_script_round_trip(name):
    s = parse((EXAMPLES / name).read_text())
    assert parse(s.to_smtlib()).commands == s.commands
