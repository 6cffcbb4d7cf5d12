"""Local simplification with the laws of logic and arithmetic.

Only local rewrites: no distribution, no normal forms.  The ``mk_*`` smart
constructors assume their children are already simplified, which is how the
relational operators use them; ``simplify`` rebuilds a whole term bottom-up
with them.
"""
from __future__ import annotations

from .terms import (
    FALSE,
    TRUE,
    And,
    App,
    BOOL,
    Compare,
    Count,
    Forall,
    FunSym,
    Id,
    Ite,
    Not,
    Term,
    Var,
    apply_builtin,
    bool_id,
    compare_ids,
    num,
)


def mk_not(a: Term) -> Term:
    if a == TRUE:
        return FALSE
    if a == FALSE:
        return TRUE
    if isinstance(a, Not):
        return a.arg
    return Not(a)


def mk_and(args) -> Term:
    flat: dict[Term, None] = {}
    for a in args:
        if isinstance(a, And):
            items = a.args
        else:
            items = (a,)
        for b in items:
            if b == FALSE:
                return FALSE
            if b == TRUE:
                continue
            flat.setdefault(b)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return next(iter(flat))
    return And(tuple(flat))


def mk_or(args) -> Term:
    return mk_not(mk_and([mk_not(a) for a in args]))


def mk_compare(op: str, left: Term, right: Term) -> Term:
    if isinstance(left, Id) and isinstance(right, Id):
        if op == "=" or (left.is_numeral and right.is_numeral):
            return bool_id(compare_ids(op, left, right))
    if left == right:
        return bool_id(op in ("=", "<=", ">="))
    if op == "=" and left.sort == BOOL:
        if right == TRUE:
            return left
        if right == FALSE:
            return mk_not(left)
        if left == TRUE:
            return right
        if left == FALSE:
            return mk_not(right)
    return Compare(op, left, right)


def mk_ite(cond: Term, then: Term, other: Term) -> Term:
    if cond == TRUE:
        return then
    if cond == FALSE:
        return other
    if then == other:
        return then
    if then == TRUE and other == FALSE:
        return cond
    if then == FALSE and other == TRUE:
        return mk_not(cond)
    return Ite(cond, then, other)


def mk_forall(vars, body: Term) -> Term:
    if isinstance(body, Id):
        return body
    names = body.free_names
    kept = tuple(v for v in vars if v.name in names)
    if not kept:
        return body
    return Forall(kept, body)


def mk_count(vars, body: Term) -> Term:
    if body == FALSE:
        return num(0)
    return Count(tuple(vars), body)


def _is_lit(t: Term) -> bool:
    return isinstance(t, Id) and t.is_numeral


def mk_app(sym: FunSym, args) -> Term:
    args = tuple(args)
    if not sym.builtin:
        return App(sym, args)
    if all(_is_lit(a) for a in args):
        v = apply_builtin(sym, args)
        if v is not None:
            return v
        return App(sym, args)
    op = sym.name
    if op in ("+", "*"):
        unit = 0 if op == "+" else 1
        flat: list[Term] = []
        for a in args:
            if isinstance(a, App) and a.sym.name == op and a.sym.builtin:
                flat.extend(a.args)
            else:
                flat.append(a)
        lits = [a for a in flat if _is_lit(a)]
        rest = [a for a in flat if not _is_lit(a)]
        if lits:
            folded = apply_builtin(FunSym(op, tuple(a.sort for a in lits), sym.result, True), lits)
            if op == "*" and folded.value == 0:
                return num(0, sym.result)
            pos = next(i for i, a in enumerate(flat) if _is_lit(a))
            out = [a for a in flat[:pos] if not _is_lit(a)]
            if folded.value != unit:
                out.append(folded)
            out.extend(a for a in flat[pos:] if not _is_lit(a))
        else:
            out = rest
        if not out:
            return num(unit, sym.result)
        if len(out) == 1:
            return out[0]
        return App(FunSym(op, tuple(a.sort for a in out), sym.result, True), tuple(out))
    if op == "-" and len(args) == 1 and isinstance(args[0], App) and args[0].sym.name == "-" \
            and args[0].sym.builtin and len(args[0].args) == 1:
        return args[0].args[0]
    return App(sym, args)


def simplify(term: Term) -> Term:
    """Bottom-up local simplification.  Idempotent and meaning-preserving."""
    if isinstance(term, (Id, Var)):
        return term
    if isinstance(term, App):
        return mk_app(term.sym, [simplify(a) for a in term.args])
    if isinstance(term, Not):
        return mk_not(simplify(term.arg))
    if isinstance(term, And):
        return mk_and([simplify(a) for a in term.args])
    if isinstance(term, Compare):
        return mk_compare(term.op, simplify(term.left), simplify(term.right))
    if isinstance(term, Ite):
        return mk_ite(simplify(term.cond), simplify(term.then), simplify(term.other))
    if isinstance(term, Forall):
        return mk_forall(term.vars, simplify(term.body))
    if isinstance(term, Count):
        return mk_count(term.vars, simplify(term.body))
    return term
