import random

from hypothesis import given, settings, strategies as st

from rground.oracle import FiniteInstance, RandomConfig, expansions, random_formula, random_signature
from rground.simplify import mk_and, mk_compare, mk_not, simplify
from rground.terms import (
    BOOL,
    FALSE,
    INT,
    TRUE,
    And,
    App,
    Compare,
    FunSym,
    Id,
    Not,
    Sort,
    arith_symbol,
    evaluate,
    num,
)

COLOR_OF = FunSym("colorOf", (INT,), Sort("Color"))
EQ12 = Compare("=", App(COLOR_OF, (num(1),)), App(COLOR_OF, (num(2),)))


def test_true_conjunct_dropped():
    assert simplify(And((TRUE, EQ12))) == EQ12


def test_arithmetic_folding():
    f = FunSym("f", (INT,), INT)
    plus = arith_symbol("+", [INT, INT])
    t = App(plus, (App(plus, (num(1), num(2))), App(f, (num(3),))))
    assert simplify(t) == App(plus, (num(3), App(f, (num(3),))))


def test_double_negation():
    p = FunSym("p", (Sort("D"),), BOOL)
    a = App(p, (Id("a", Sort("D")),))
    assert simplify(Not(Not(a))) == a


def test_literal_comparison():
    assert simplify(Compare("=", num(2), num(2))) == TRUE
    assert mk_compare("<", num(3), num(2)) == FALSE


def test_smart_constructors():
    assert mk_and([]) == TRUE
    assert mk_and([EQ12, FALSE]) == FALSE
    assert mk_not(TRUE) == FALSE


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_simplify_preserves_meaning(seed):
    rng = random.Random(seed)
    sig = random_signature(rng, RandomConfig(max_open_points=4))
    t = random_formula(rng, sig, 3)
    s = simplify(t)
    assert simplify(s) == s
    for A in expansions(FiniteInstance(sig.structure, (t,))):
        assert evaluate(s, A) == evaluate(t, A)
