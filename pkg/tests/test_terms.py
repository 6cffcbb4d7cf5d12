import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from rground.oracle import RandomConfig, expansions, FiniteInstance, random_formula, random_signature
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
    Fresh,
    FunSym,
    Id,
    Interpretation,
    Not,
    PartialStructure,
    Sort,
    Var,
    evaluate,
    free_variables,
    is_reserved_name,
    is_simple,
    lift_ite,
    num,
    rename_shadowed,
    substitute,
    unnest,
)

EDGE = FunSym("edge", (INT, INT), BOOL)
x, y = Var("x", INT), Var("y", INT)
EDGE_TOTAL = PartialStructure({}, {EDGE: Interpretation({(num(1), num(2)): TRUE, (num(2), num(3)): TRUE}, FALSE)})


def test_evaluate_edge_atom():
    assert evaluate(App(EDGE, (x, y)), EDGE_TOTAL, {"x": num(1), "y": num(2)}) == TRUE
    assert evaluate(App(EDGE, (x, y)), EDGE_TOTAL, {"x": num(2), "y": num(1)}) == FALSE


def test_evaluate_true_is_true():
    assert evaluate(TRUE, PartialStructure()) == TRUE


def test_evaluate_count_over_finite_universe():
    # same edge relation over a 3-element datatype: 2 of the 9 pairs hold
    N = Sort("N")
    ids = tuple(Id(f"n{i}", N) for i in (1, 2, 3))
    e = FunSym("edge", (N, N), BOOL)
    A = PartialStructure({N: ids}, {e: Interpretation({(ids[0], ids[1]): TRUE, (ids[1], ids[2]): TRUE}, FALSE)})
    a, b = Var("a", N), Var("b", N)
    expected = sum(1 for p in itertools.product(ids, ids) if p in {(ids[0], ids[1]), (ids[1], ids[2])})
    assert evaluate(Count((a, b), App(e, (a, b))), A) == num(expected) == num(2)


def test_free_variables():
    assert free_variables(App(EDGE, (x, y))) == [x, y]
    assert free_variables(Forall((y,), App(EDGE, (x, y)))) == [x]
    assert free_variables(Compare("=", Count((y,), App(EDGE, (x, y))), num(2))) == [x]


def test_substitute_respects_binders():
    t = And((App(EDGE, (x, y)), Forall((x,), App(EDGE, (x, y)))))
    out = substitute(t, {"x": num(7)})
    assert out.args[0] == App(EDGE, (num(7), y))
    assert out.args[1] == Forall((x,), App(EDGE, (x, y)))


# unnesting -------------------------------------------------------------

D = Sort("D")
DIDS = tuple(Id(f"d{i}", D) for i in range(3))
P = FunSym("p", (D,), BOOL)
F = FunSym("f", (D,), D)
A_CONST = FunSym("a", (), D)


def _all_total_structures():
    for fvals in itertools.product(DIDS, repeat=3):
        for pvals in itertools.product((TRUE, FALSE), repeat=3):
            yield PartialStructure({D: DIDS}, {
                F: Interpretation(dict(zip([(d,) for d in DIDS], fvals))),
                P: Interpretation(dict(zip([(d,) for d in DIDS], pvals))),
                A_CONST: Interpretation({(): DIDS[0]}),
            })


def test_unnest_nested_application_is_equivalent():
    t = App(P, (App(F, (App(A_CONST, ()),)),))
    u = unnest(t)
    assert isinstance(u, Not) and isinstance(u.arg.args[0], Forall) or not is_simple(t)
    assert is_simple(u)
    for A in _all_total_structures():
        assert evaluate(t, A) == evaluate(u, A)


def test_unnest_leaves_simple_terms():
    c = Id("c", D)
    assert unnest(App(P, (c,))) == App(P, (c,))
    C = Sort("Color")
    col = FunSym("colorOf", (INT,), C)
    t = Compare("=", App(col, (x,)), App(col, (y,)))
    assert unnest(t) == t


# renaming ----------------------------------------------------------------

Q = FunSym("q", (D,), BOOL)
u_ = Var("u", D)


def test_rename_shadowed_sibling_binders():
    t = And((Forall((u_,), App(P, (u_,))), Forall((u_,), App(Q, (u_,)))))
    r = rename_shadowed(t)
    (v0,), (v1,) = r.args[0].vars, r.args[1].vars
    assert v0.name == "u" and v1.name != "u"
    assert r.args[1].body == App(Q, (v1,))


def test_rename_shadowed_no_binders():
    t = App(P, (u_,))
    assert rename_shadowed(t) == t


def test_rename_shadowed_inner_binder():
    t = Forall((u_,), And((Forall((u_,), App(P, (u_,))), App(Q, (u_,)))))
    r = rename_shadowed(t)
    inner = r.body.args[0]
    assert inner.vars[0].name != "u"
    assert r.body.args[1] == App(Q, (u_,))


def test_fresh_names_are_reserved():
    v = Fresh().var("z", D)
    assert is_reserved_name(v.name)
    assert not is_reserved_name("z")


# properties -----------------------------------------------------------------

def _total_cases(seed):
    rng = random.Random(seed)
    sig = random_signature(rng, RandomConfig(max_open_points=4))
    t = random_formula(rng, sig, 3)
    return sig, t, list(expansions(FiniteInstance(sig.structure, (t,))))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_rewrites_preserve_meaning(seed):
    sig, t, exps = _total_cases(seed)
    interpreted = set(sig.structure.interps)
    lifted = lift_ite(t)  # unnest expects ite already lifted
    variants = [rename_shadowed(t), lifted,
                unnest(lifted, needs_simple=lambda s: s in interpreted),
                unnest(lifted, needs_simple=lambda s: not s.builtin)]
    for A in exps:
        want = evaluate(t, A)
        assert all(evaluate(v, A) == want for v in variants)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_unnest_yields_simple_applications(seed):
    _, t, _ = _total_cases(seed)
    assert is_simple(unnest(lift_ite(t)))  # every argument unnested, arithmetic included


def test_evaluate_rejects_open_structure():
    from rground.terms import MissingInterpretation

    with pytest.raises(MissingInterpretation):
        evaluate(App(P, (DIDS[0],)), PartialStructure({D: DIDS}, {}))
