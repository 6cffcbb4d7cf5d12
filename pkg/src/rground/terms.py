"""Sorted first-order terms with a count aggregate, partial structures and the
reference evaluator.

Terms are immutable and hashable; the grounder stores them directly in relation
rows.  ``evaluate`` is deliberately naive: it is the oracle the rest of the
package is tested against, so it enumerates finite universes instead of doing
anything clever.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence


class TermError(Exception):
    pass


class MissingInterpretation(TermError):
    pass


class InfiniteEvaluation(TermError):
    pass


class UnboundVariable(TermError):
    pass


class NonBooleanNestingContext(TermError):
    pass


# ---------------------------------------------------------------- signature


@dataclass(frozen=True)
class Sort:
    name: str

    @property
    def is_numeric(self) -> bool:
        return self.name in ("Int", "Real")

    def __str__(self) -> str:
        return self.name


BOOL = Sort("Bool")
INT = Sort("Int")
REAL = Sort("Real")
BUILTIN_SORTS = {"Bool": BOOL, "Int": INT, "Real": REAL}


@dataclass(frozen=True)
class FunSym:
    """A ranked function symbol.  ``builtin`` marks arithmetic operators, which
    are interpreted by the engine rather than by the structure."""

    name: str
    arg_sorts: tuple[Sort, ...]
    result: Sort
    builtin: bool = False

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    @property
    def is_predicate(self) -> bool:
        return self.result == BOOL

    def __str__(self) -> str:
        return self.name


ARITH_OPS = ("+", "-", "*", "/", "div", "mod", "abs")


def arith_symbol(op: str, arg_sorts: Sequence[Sort]) -> FunSym:
    if op == "/":
        result = REAL
    elif op in ("div", "mod"):
        result = INT
    else:
        result = REAL if REAL in arg_sorts else INT
    return FunSym(op, tuple(arg_sorts), result, builtin=True)


# -------------------------------------------------------------------- terms


class Term:
    """Base class of all term nodes.

    Equality is structural.  Hashes and free-variable sets are cached on the
    node since rows hash the same subterms over and over.
    """

    sort: Sort

    def _key(self) -> tuple:
        raise NotImplementedError

    def __hash__(self) -> int:
        try:
            return self._h
        except AttributeError:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_h", h)
            return h

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if type(self) is not type(other):
            return False
        return hash(self) == hash(other) and self._key() == other._key()

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    @property
    def free_names(self) -> frozenset[str]:
        fv = self.__dict__.get("_fv")
        if fv is None:
            fv = self._free_names()
            object.__setattr__(self, "_fv", fv)
        return fv

    def _free_names(self) -> frozenset[str]:
        return frozenset()

    @property
    def is_closed(self) -> bool:
        return not self.free_names

    def children(self) -> tuple["Term", ...]:
        return ()

    def __repr__(self) -> str:
        from .printer import term_to_smtlib

        return term_to_smtlib(self)

    __str__ = __repr__


@dataclass(frozen=True, eq=False, repr=False)
class Id(Term):
    """A domain element: a nullary constructor, a boolean, or a numeric literal.
    ``value`` is a str for constructors/booleans, int for Int, Fraction for Real."""

    value: object
    sort: Sort

    def _key(self):
        return (self.value, self.sort.name)

    @property
    def is_numeral(self) -> bool:
        return self.sort.is_numeric


@dataclass(frozen=True, eq=False, repr=False)
class Var(Term):
    name: str
    sort: Sort

    def _key(self):
        return (self.name, self.sort.name)

    def _free_names(self):
        return frozenset((self.name,))


@dataclass(frozen=True, eq=False, repr=False)
class App(Term):
    sym: FunSym
    args: tuple[Term, ...] = ()

    def _key(self):
        return (self.sym, self.args)

    @property
    def sort(self) -> Sort:  # type: ignore[override]
        return self.sym.result

    def _free_names(self):
        return frozenset().union(*(a.free_names for a in self.args)) if self.args else frozenset()

    def children(self):
        return self.args


@dataclass(frozen=True, eq=False, repr=False)
class Not(Term):
    arg: Term
    sort = BOOL

    def _key(self):
        return (self.arg,)

    def _free_names(self):
        return self.arg.free_names

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False, repr=False)
class And(Term):
    args: tuple[Term, ...]
    sort = BOOL

    def _key(self):
        return self.args

    def _free_names(self):
        return frozenset().union(*(a.free_names for a in self.args)) if self.args else frozenset()

    def children(self):
        return self.args


COMPARE_OPS = ("<", "<=", "=", ">=", ">")


@dataclass(frozen=True, eq=False, repr=False)
class Compare(Term):
    op: str
    left: Term
    right: Term
    sort = BOOL

    def _key(self):
        return (self.op, self.left, self.right)

    def _free_names(self):
        return self.left.free_names | self.right.free_names

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False, repr=False)
class Forall(Term):
    vars: tuple[Var, ...]
    body: Term
    sort = BOOL

    def _key(self):
        return (self.vars, self.body)

    def _free_names(self):
        return self.body.free_names - {v.name for v in self.vars}

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=False, repr=False)
class Count(Term):
    vars: tuple[Var, ...]
    body: Term
    sort = INT

    def _key(self):
        return (self.vars, self.body)

    def _free_names(self):
        return self.body.free_names - {v.name for v in self.vars}

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=False, repr=False)
class Ite(Term):
    cond: Term
    then: Term
    other: Term

    def _key(self):
        return (self.cond, self.then, self.other)

    @property
    def sort(self) -> Sort:  # type: ignore[override]
        return self.then.sort

    def _free_names(self):
        return self.cond.free_names | self.then.free_names | self.other.free_names

    def children(self):
        return (self.cond, self.then, self.other)


TRUE = Id("true", BOOL)
FALSE = Id("false", BOOL)


def bool_id(b: bool) -> Id:
    return TRUE if b else FALSE


def num(value, sort: Sort = None) -> Id:
    """Numeric literal; Real literals are kept as exact fractions."""
    if sort is None:
        sort = INT if isinstance(value, int) else REAL
    if sort == REAL:
        return Id(Fraction(value), REAL)
    return Id(int(value), INT)


def is_id(t: Term) -> bool:
    return isinstance(t, Id)


# ---------------------------------------------------- derived connectives


def mk_or(args: Sequence[Term]) -> Term:
    return Not(And(tuple(Not(a) for a in args)))


def mk_implies(a: Term, b: Term) -> Term:
    return Not(And((a, Not(b))))


def mk_exists(vars: Sequence[Var], body: Term) -> Term:
    return Not(Forall(tuple(vars), Not(body)))


# --------------------------------------------------------------- structures


@dataclass(frozen=True)
class Interpretation:
    """A possibly partial interpretation of a function symbol.

    Points in ``mapping`` have the given value; points in ``unknown`` are left
    open; every other point takes ``default`` (``None`` = left open).
    """

    mapping: Mapping[tuple[Id, ...], Id] = field(default_factory=dict)
    default: Optional[Id] = None
    unknown: frozenset = frozenset()

    def lookup(self, args: tuple[Id, ...]) -> Optional[Id]:
        v = self.mapping.get(args)
        if v is not None:
            return v
        if args in self.unknown:
            return None
        return self.default

    @property
    def has_open_points(self) -> bool:
        return self.default is None or bool(self.unknown)


@dataclass(frozen=True)
class PartialStructure:
    """Sort universes plus partial symbol interpretations.

    ``universes`` maps each datatype sort to its ids in declaration order.
    Bool, Int and Real are implicit; the numeric ones are infinite.
    """

    universes: Mapping[Sort, tuple[Id, ...]] = field(default_factory=dict)
    interps: Mapping[FunSym, Interpretation] = field(default_factory=dict)

    def universe(self, sort: Sort) -> Optional[tuple[Id, ...]]:
        if sort == BOOL:
            return (TRUE, FALSE)
        if sort.is_numeric:
            return None
        try:
            return self.universes[sort]
        except KeyError:
            raise TermError(f"unknown sort {sort}") from None

    def is_finite(self, sort: Sort) -> bool:
        return self.universe(sort) is not None

    def interpretation(self, sym: FunSym) -> Optional[Interpretation]:
        return self.interps.get(sym)

    def value(self, sym: FunSym, args: tuple[Id, ...]) -> Optional[Id]:
        interp = self.interps.get(sym)
        return None if interp is None else interp.lookup(args)

    def with_interps(self, interps: Mapping[FunSym, Interpretation]) -> "PartialStructure":
        merged = dict(self.interps)
        merged.update(interps)
        return PartialStructure(self.universes, merged)


# ------------------------------------------------------------- arithmetic


def apply_builtin(sym: FunSym, args: Sequence[Id]) -> Optional[Id]:
    """Value of a built-in arithmetic application on literal ids, or ``None``
    when undefined (division by zero)."""
    vals = [a.value for a in args]
    op = sym.name
    if op == "+":
        v = sum(vals)
    elif op == "*":
        v = 1
        for x in vals:
            v *= x
    elif op == "-":
        v = -vals[0] if len(vals) == 1 else vals[0] - sum(vals[1:])
    elif op == "abs":
        v = abs(vals[0])
    elif op == "/":
        v = Fraction(vals[0])
        for x in vals[1:]:
            if x == 0:
                return None
            v /= x
    elif op in ("div", "mod"):
        a, b = vals
        if b == 0:
            return None
        # SMT-LIB: euclidean division, remainder always non-negative
        q = a // b if b > 0 else -(a // -b)
        r = a - b * q
        if r < 0:
            q, r = (q + 1, r - b) if b < 0 else (q - 1, r + b)
        v = q if op == "div" else r
    else:
        raise TermError(f"unknown builtin {op}")
    return num(v, sym.result)


def compare_ids(op: str, a: Id, b: Id) -> bool:
    if op == "=":
        return a == b
    x, y = a.value, b.value
    if op == "<":
        return x < y
    if op == "<=":
        return x <= y
    if op == ">=":
        return x >= y
    if op == ">":
        return x > y
    raise TermError(f"unknown comparison {op}")


# ---------------------------------------------------------------- evaluate


def evaluate(term: Term, structure: PartialStructure, valuation: Mapping = None) -> Id:
    """Meaning of ``term`` in a total structure under ``valuation``.

    The valuation may be keyed by variable names or by ``Var`` objects.
    """
    env = {}
    for k, v in (valuation or {}).items():
        env[k.name if isinstance(k, Var) else k] = v
    return _eval(term, structure, env)


def _eval(t: Term, A: PartialStructure, env: dict) -> Id:
    if isinstance(t, Id):
        return t
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise UnboundVariable(t.name) from None
    if isinstance(t, App):
        args = tuple(_eval(a, A, env) for a in t.args)
        if t.sym.builtin:
            v = apply_builtin(t.sym, args)
        else:
            v = A.value(t.sym, args)
        if v is None:
            raise MissingInterpretation(f"{t.sym.name}{tuple(map(str, args))}")
        return v
    if isinstance(t, Not):
        return bool_id(_eval(t.arg, A, env) == FALSE)
    if isinstance(t, And):
        for a in t.args:
            if _eval(a, A, env) == FALSE:
                return FALSE
        return TRUE
    if isinstance(t, Compare):
        return bool_id(compare_ids(t.op, _eval(t.left, A, env), _eval(t.right, A, env)))
    if isinstance(t, Ite):
        return _eval(t.then if _eval(t.cond, A, env) == TRUE else t.other, A, env)
    if isinstance(t, Forall):
        for vals in _valuations(t.vars, A):
            inner = dict(env)
            inner.update(zip((v.name for v in t.vars), vals))
            if _eval(t.body, A, inner) == FALSE:
                return FALSE
        return TRUE
    if isinstance(t, Count):
        n = 0
        for vals in _valuations(t.vars, A):
            inner = dict(env)
            inner.update(zip((v.name for v in t.vars), vals))
            if _eval(t.body, A, inner) == TRUE:
                n += 1
        return num(n)
    raise TermError(f"cannot evaluate {type(t).__name__}")


def _valuations(vars: Sequence[Var], A: PartialStructure):
    universes = []
    for v in vars:
        u = A.universe(v.sort)
        if u is None:
            raise InfiniteEvaluation(f"{v.name} ranges over {v.sort}")
        universes.append(u)
    return itertools.product(*universes)


# -------------------------------------------------------- syntactic helpers


def free_variables(term: Term) -> list[Var]:
    """Free variables in order of first occurrence."""
    out: dict[str, Var] = {}

    def walk(t: Term, bound: frozenset):
        if isinstance(t, Var):
            if t.name not in bound and t.name not in out:
                out[t.name] = t
        elif isinstance(t, (Forall, Count)):
            walk(t.body, bound | {v.name for v in t.vars})
        else:
            for c in t.children():
                walk(c, bound)

    walk(term, frozenset())
    return list(out.values())


def substitute(term: Term, mapping: Mapping[str, Term]) -> Term:
    """Replace free variables by name.  Binders shadow the mapping."""
    if not mapping or not (term.free_names & mapping.keys()):
        return term
    if isinstance(term, Var):
        return mapping.get(term.name, term)
    if isinstance(term, App):
        return App(term.sym, tuple(substitute(a, mapping) for a in term.args))
    if isinstance(term, Not):
        return Not(substitute(term.arg, mapping))
    if isinstance(term, And):
        return And(tuple(substitute(a, mapping) for a in term.args))
    if isinstance(term, Compare):
        return Compare(term.op, substitute(term.left, mapping), substitute(term.right, mapping))
    if isinstance(term, Ite):
        return Ite(*(substitute(c, mapping) for c in term.children()))
    if isinstance(term, (Forall, Count)):
        inner = {k: v for k, v in mapping.items() if k not in {x.name for x in term.vars}}
        return type(term)(term.vars, substitute(term.body, inner))
    return term


def rebuild(term: Term, children: Sequence[Term]) -> Term:
    """Same node with new children."""
    if isinstance(term, App):
        return App(term.sym, tuple(children))
    if isinstance(term, Not):
        return Not(children[0])
    if isinstance(term, And):
        return And(tuple(children))
    if isinstance(term, Compare):
        return Compare(term.op, children[0], children[1])
    if isinstance(term, Ite):
        return Ite(*children)
    if isinstance(term, (Forall, Count)):
        return type(term)(term.vars, children[0])
    return term


def subterms(term: Term) -> Iterable[Term]:
    stack = [term]
    while stack:
        t = stack.pop()
        yield t
        stack.extend(reversed(t.children()))


def has_binder(term: Term) -> bool:
    return any(isinstance(t, (Forall, Count)) for t in subterms(term))


def symbols_of(term: Term) -> list[FunSym]:
    seen: dict[FunSym, None] = {}
    for t in subterms(term):
        if isinstance(t, App) and not t.sym.builtin:
            seen.setdefault(t.sym)
    return list(seen)


class Fresh:
    """Generator of fresh variable names.  The ``!n`` suffix is rejected by the
    reader for user symbols, so these can never collide with input names."""

    def __init__(self):
        self._n = itertools.count(1)

    def var(self, base: str, sort: Sort) -> Var:
        base = base.split("!")[0] or "z"
        return Var(f"{base}!{next(self._n)}", sort)


def is_reserved_name(name: str) -> bool:
    head, sep, tail = name.rpartition("!")
    return name.startswith("#") or (bool(sep) and tail.isdigit())


# ------------------------------------------------------------ rename/unnest


def rename_shadowed(term: Term, fresh: Fresh = None) -> Term:
    """Alpha-rename binders so that every binder introduces a name used
    nowhere else in the term (neither free nor by another binder)."""
    fresh = fresh or Fresh()
    used = {v.name for v in free_variables(term)}

    def walk(t: Term, env: dict) -> Term:
        if isinstance(t, Var):
            return env.get(t.name, t)
        if isinstance(t, (Forall, Count)):
            inner = dict(env)
            new_vars = []
            for v in t.vars:
                if v.name in used:
                    nv = fresh.var(v.name, v.sort)
                else:
                    nv = v
                used.add(nv.name)
                inner[v.name] = nv
                new_vars.append(nv)
            return type(t)(tuple(new_vars), walk(t.body, inner))
        kids = t.children()
        if not kids:
            return t
        return rebuild(t, [walk(c, env) for c in kids])

    return walk(term, {})


def lift_ite(term: Term) -> Term:
    """Remove ``ite`` nodes from formulas: a boolean ``ite`` becomes a pair of
    guarded conjunctions, and an atom containing a term-level ``ite`` is split
    on its condition."""

    def formula(t: Term) -> Term:
        if isinstance(t, Ite) and t.sort == BOOL:
            c, a, b = formula(t.cond), formula(t.then), formula(t.other)
            return mk_or([And((c, a)), And((Not(c), b))])
        if isinstance(t, Not):
            return Not(formula(t.arg))
        if isinstance(t, And):
            return And(tuple(formula(a) for a in t.args))
        if isinstance(t, Forall):
            return Forall(t.vars, formula(t.body))
        if isinstance(t, Compare) and t.left.sort == BOOL:
            return Compare(t.op, formula(t.left), formula(t.right))
        ite = _find_term_ite(t)
        if ite is None:
            return _map_counts(t, formula)
        a = _replace(t, ite, ite.then)
        b = _replace(t, ite, ite.other)
        c = formula(ite.cond)
        return mk_or([And((c, formula(a))), And((Not(c), formula(b)))])

    return formula(term)


def _find_term_ite(t: Term) -> Optional[Ite]:
    for c in t.children():
        if isinstance(c, (Forall, Count)):
            continue
        if isinstance(c, Ite):
            return c
        if c.sort != BOOL or isinstance(c, App):
            found = _find_term_ite(c)
            if found is not None:
                return found
    return None


def _replace(t: Term, old: Term, new: Term) -> Term:
    if t is old or t == old:
        return new
    kids = t.children()
    if not kids or isinstance(t, (Forall, Count)):
        return t
    return rebuild(t, [_replace(c, old, new) for c in kids])


def _map_counts(t: Term, formula) -> Term:
    if isinstance(t, Count):
        return Count(t.vars, formula(t.body))
    kids = t.children()
    if not kids:
        return t
    return rebuild(t, [_map_counts(c, formula) for c in kids])


def unnest(term: Term, needs_simple=None, fresh: Fresh = None) -> Term:
    """Bring applications into simple form.

    Every argument of an application that is not an id or a variable is
    replaced by a fresh variable ``z`` and the enclosing atom ``A`` becomes
    ``forall z. (z = u) => A``.  ``needs_simple(sym)`` restricts which
    applications get this treatment (default: all).
    """
    fresh = fresh or Fresh()
    if needs_simple is None:
        needs_simple = lambda sym: True  # noqa: E731

    def formula(t: Term) -> Term:
        if isinstance(t, Not):
            return Not(formula(t.arg))
        if isinstance(t, And):
            return And(tuple(formula(a) for a in t.args))
        if isinstance(t, Forall):
            return Forall(t.vars, formula(t.body))
        if isinstance(t, Compare) and t.left.sort == BOOL:
            return Compare(t.op, formula(t.left), formula(t.right))
        if isinstance(t, (Id, Var)):
            return t
        if isinstance(t, (App, Compare)):
            extracted: list[tuple[Var, Term]] = []
            atom = flatten(t, extracted)
            if not extracted:
                return atom
            zs = tuple(z for z, _ in extracted)
            eqs = [Compare("=", z, u) for z, u in extracted]
            return Forall(zs, mk_implies(And(tuple(eqs)), atom))
        if isinstance(t, Ite):
            raise NonBooleanNestingContext("ite must be lifted before unnesting")
        raise NonBooleanNestingContext(f"{type(t).__name__} is not a formula")

    def flatten(t: Term, extracted) -> Term:
        if isinstance(t, App):
            new_args = []
            for a in t.args:
                a2 = flatten(a, extracted)
                if needs_simple(t.sym) and not isinstance(a2, (Id, Var)):
                    z = fresh.var("z", a2.sort)
                    extracted.append((z, a2))
                    a2 = z
                new_args.append(a2)
            return App(t.sym, tuple(new_args))
        if isinstance(t, Compare):
            return Compare(t.op, flatten(t.left, extracted), flatten(t.right, extracted))
        if isinstance(t, Count):
            return Count(t.vars, formula(t.body))
        if t.sort == BOOL and not isinstance(t, (Id, Var)):
            # boolean argument of an application: a formula in its own right
            return formula(t)
        if isinstance(t, Ite):
            raise NonBooleanNestingContext("ite must be lifted before unnesting")
        return t

    if term.sort != BOOL:
        if isinstance(term, (Id, Var)):
            return term
        raise NonBooleanNestingContext("unnesting needs a boolean context")
    return formula(term)


def is_simple(term: Term) -> bool:
    return all(
        all(isinstance(a, (Id, Var)) for a in t.args)
        for t in subterms(term)
        if isinstance(t, App)
    )
