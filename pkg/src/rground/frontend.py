"""Reader for the supported SMT-LIB subset and its x-extensions.

Supported commands: ``set-logic``, ``set-option``, ``set-info``,
``declare-datatype(s)`` with nullary constructors, ``declare-fun``,
``declare-const``, ``define-fun`` (inlined as a macro), ``assert``,
``x-interpret-const``, ``x-interpret-pred``, ``x-interpret-fun``,
``x-ground``, ``check-sat``, ``get-model``, ``get-value``, ``echo`` and
``exit``.

Interpretation grammar::

    (x-interpret-const c v)
    (x-interpret-pred p (x-set (a1 .. an) ...) [(x-unknown (a1 .. an) ...)])
    (x-interpret-fun f (x-mapping ((a1 .. an) v) ...) [(x-else v)])

``x-set`` is closed-world: unlisted tuples are false.  ``x-unknown`` lists
tuples left open.  Without ``x-else`` the unlisted points of a function are
left open.

Connectives ``or``, ``=>``, ``exists``, ``distinct`` and chained comparisons
are desugared while reading.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Union

from . import sexpr
from .printer import id_to_smtlib, sort_to_smtlib, symbol, term_to_smtlib
from .sexpr import Atom, Loc, ParseError, SList
from .simplify import simplify
from .terms import (
    ARITH_OPS,
    BOOL,
    BUILTIN_SORTS,
    FALSE,
    INT,
    REAL,
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
    Ite,
    Not,
    PartialStructure,
    Sort,
    Term,
    Var,
    arith_symbol,
    free_variables,
    is_reserved_name,
    lift_ite,
    mk_exists,
    mk_implies,
    mk_or,
    num,
    rebuild,
    rename_shadowed,
    substitute,
    unnest,
)


class FrontendError(Exception):
    def __init__(self, msg: str, loc: Loc = None):
        super().__init__(f"{loc}: {msg}" if loc else msg)
        self.loc = loc


class ScriptSyntaxError(FrontendError):
    pass


class SortError(FrontendError):
    def __init__(self, loc: Loc, expected, found):
        super().__init__(f"expected sort {expected}, found {found}", loc)
        self.expected = expected
        self.found = found


class UndeclaredSymbol(FrontendError):
    pass


class UnsupportedCommand(FrontendError):
    pass


SyntaxError = ScriptSyntaxError  # noqa: A001  (name used in the error vocabulary)

_UNSUPPORTED = {
    "let", "match", "xor", "push", "pop", "x-define-fun-ind", "declare-sort",
    "define-sort", "define-fun-rec", "define-funs-rec", "reset", "reset-assertions",
}
_PREAMBLE = {"set-logic", "set-option", "set-info"}
_TRAILER = {"check-sat", "get-model", "get-value", "get-assignment", "get-info",
            "get-option", "exit"}


# ------------------------------------------------------------- commands


@dataclass(frozen=True)
class DeclareDatatype:
    sort: Sort
    constructors: tuple[Id, ...]

    def to_smtlib(self) -> str:
        ctors = " ".join(f"({id_to_smtlib(c)})" for c in self.constructors)
        return f"(declare-datatype {sort_to_smtlib(self.sort)} ({ctors}))"


@dataclass(frozen=True)
class DeclareFun:
    symbol: FunSym
    const: bool = False

    def to_smtlib(self) -> str:
        s = self.symbol
        if self.const:
            return f"(declare-const {symbol(s.name)} {sort_to_smtlib(s.result)})"
        args = " ".join(sort_to_smtlib(a) for a in s.arg_sorts)
        return f"(declare-fun {symbol(s.name)} ({args}) {sort_to_smtlib(s.result)})"


@dataclass(frozen=True)
class DefineFun:
    symbol: FunSym
    params: tuple[Var, ...]
    body: Term

    def to_smtlib(self) -> str:
        ps = " ".join(f"({symbol(v.name)} {sort_to_smtlib(v.sort)})" for v in self.params)
        return (f"(define-fun {symbol(self.symbol.name)} ({ps}) "
                f"{sort_to_smtlib(self.symbol.result)} {term_to_smtlib(self.body)})")


@dataclass(frozen=True)
class Assert:
    term: Term

    def to_smtlib(self) -> str:
        return f"(assert {term_to_smtlib(self.term)})"


def _tuple_text(t: tuple) -> str:
    return "(" + " ".join(id_to_smtlib(a) for a in t) + ")"


@dataclass(frozen=True)
class XInterpretConst:
    symbol: FunSym
    value: Id

    def to_smtlib(self) -> str:
        return f"(x-interpret-const {symbol(self.symbol.name)} {id_to_smtlib(self.value)})"


@dataclass(frozen=True)
class XInterpretPred:
    symbol: FunSym
    atoms: tuple[tuple[Id, ...], ...]
    unknown: tuple[tuple[Id, ...], ...] = ()

    def to_smtlib(self) -> str:
        out = f"(x-interpret-pred {symbol(self.symbol.name)} (x-set"
        out += "".join(" " + _tuple_text(a) for a in self.atoms) + ")"
        if self.unknown:
            out += " (x-unknown" + "".join(" " + _tuple_text(a) for a in self.unknown) + ")"
        return out + ")"


@dataclass(frozen=True)
class XInterpretFun:
    symbol: FunSym
    mapping: tuple[tuple[tuple[Id, ...], Id], ...]
    default: Optional[Id] = None

    def to_smtlib(self) -> str:
        out = f"(x-interpret-fun {symbol(self.symbol.name)} (x-mapping"
        out += "".join(f" ({_tuple_text(k)} {id_to_smtlib(v)})" for k, v in self.mapping) + ")"
        if self.default is not None:
            out += f" (x-else {id_to_smtlib(self.default)})"
        return out + ")"


@dataclass(frozen=True)
class XGround:
    def to_smtlib(self) -> str:
        return "(x-ground)"


@dataclass(frozen=True)
class CheckSat:
    def to_smtlib(self) -> str:
        return "(check-sat)"


@dataclass(frozen=True)
class GetModel:
    def to_smtlib(self) -> str:
        return "(get-model)"


@dataclass(frozen=True)
class Echo:
    text: str

    def to_smtlib(self) -> str:
        return '(echo "' + self.text.replace('"', '""') + '")'


@dataclass(frozen=True)
class Passthrough:
    """A command copied verbatim; ``head`` is its command name."""

    head: str
    raw: str

    def to_smtlib(self) -> str:
        return self.raw


Command = Union[DeclareDatatype, DeclareFun, DefineFun, Assert, XInterpretConst,
                XInterpretPred, XInterpretFun, XGround, CheckSat, GetModel, Echo, Passthrough]


def sexpr_text(sx) -> str:
    if isinstance(sx, Atom):
        if sx.kind == "string":
            return '"' + sx.text.replace('"', '""') + '"'
        if sx.kind == "symbol":
            return symbol(sx.text)
        return sx.text
    return "(" + " ".join(sexpr_text(i) for i in sx.items) + ")"


# --------------------------------------------------------------- script


@dataclass
class Script:
    commands: list = field(default_factory=list)
    sorts: dict = field(default_factory=lambda: dict(BUILTIN_SORTS))
    datatypes: dict = field(default_factory=dict)  # Sort -> tuple of Id
    constructors: dict = field(default_factory=dict)  # name -> Id
    functions: dict = field(default_factory=dict)  # name -> FunSym
    macros: dict = field(default_factory=dict)  # FunSym -> (params, body)
    interps: dict = field(default_factory=dict)  # FunSym -> Interpretation
    preprocessed: bool = False

    @property
    def structure(self) -> PartialStructure:
        return PartialStructure(dict(self.datatypes), dict(self.interps))

    @property
    def assertions(self) -> list[Term]:
        return [c.term for c in self.commands if isinstance(c, Assert)]

    def to_smtlib(self) -> str:
        return "".join(c.to_smtlib() + "\n" for c in self.commands)


# ---------------------------------------------------------------- reader


def _expect_symbol(sx, what: str) -> str:
    if not isinstance(sx, Atom) or sx.kind != "symbol":
        raise ScriptSyntaxError(f"expected {what}", sx.loc)
    return sx.text


def _expect_list(sx, what: str) -> SList:
    if not isinstance(sx, SList):
        raise ScriptSyntaxError(f"expected {what}", sx.loc)
    return sx


class _Reader:
    def __init__(self):
        self.s = Script()

    # -- names and sorts

    def _fresh_name(self, sx) -> str:
        name = _expect_symbol(sx, "a symbol")
        if is_reserved_name(name):
            raise ScriptSyntaxError(f"reserved symbol name {name}", sx.loc)
        if name in self.s.functions or name in self.s.constructors or name in ("true", "false"):
            raise ScriptSyntaxError(f"symbol {name} already declared", sx.loc)
        return name

    def sort(self, sx) -> Sort:
        name = _expect_symbol(sx, "a sort")
        try:
            return self.s.sorts[name]
        except KeyError:
            raise UndeclaredSymbol(f"unknown sort {name}", sx.loc) from None

    def function(self, sx) -> FunSym:
        name = _expect_symbol(sx, "a function symbol")
        sym = self.s.functions.get(name)
        if sym is None:
            raise UndeclaredSymbol(f"undeclared symbol {name}", sx.loc)
        return sym

    # -- terms

    def term(self, sx, env: dict) -> Term:
        if isinstance(sx, Atom):
            return self._atom(sx, env)
        if not sx.items:
            raise ScriptSyntaxError("empty application", sx.loc)
        head = sx[0]
        if isinstance(head, SList):
            raise UnsupportedCommand("indexed or qualified identifiers are not supported", head.loc)
        op = head.text
        args = sx.items[1:]
        if op in ("forall", "exists", "x-count"):
            return self._binder(op, sx, env)
        if op in ("let", "match", "xor"):
            raise UnsupportedCommand(f"'{op}' is not supported", head.loc)
        if op == "!":
            return self.term(args[0], env)
        if op in env or (op not in self.s.functions and op in self.s.constructors):
            raise ScriptSyntaxError(f"{op} cannot be applied", head.loc)
        if op in self.s.functions:
            return self._apply(self.s.functions[op], args, env, sx.loc)
        ts = [self.term(a, env) for a in args]
        if op == "not":
            self._arity(sx, ts, 1)
            return Not(self._bool(ts[0], args[0]))
        if op in ("and", "or"):
            self._arity(sx, ts, 1, None)
            ts = [self._bool(t, a) for t, a in zip(ts, args)]
            if len(ts) == 1:
                return ts[0]
            return And(tuple(ts)) if op == "and" else mk_or(ts)
        if op == "=>":
            self._arity(sx, ts, 2, None)
            ts = [self._bool(t, a) for t, a in zip(ts, args)]
            out = ts[-1]
            for t in reversed(ts[:-1]):
                out = mk_implies(t, out)
            return out
        if op == "ite":
            self._arity(sx, ts, 3)
            c = self._bool(ts[0], args[0])
            a, b = self._unify_sorts(ts[1:], args[1:], sx.loc)
            return Ite(c, a, b)
        if op in ("=", "distinct", "<", "<=", ">", ">="):
            self._arity(sx, ts, 2, None)
            ts = self._unify_sorts(ts, args, sx.loc)
            if op != "=" and op != "distinct" and not ts[0].sort.is_numeric:
                raise SortError(sx.loc, "Int or Real", ts[0].sort)
            if op == "distinct":
                parts = [Not(Compare("=", a, b)) for a, b in itertools.combinations(ts, 2)]
            else:
                parts = [Compare(op, a, b) for a, b in zip(ts, ts[1:])]
            return parts[0] if len(parts) == 1 else And(tuple(parts))
        if op in ARITH_OPS:
            return self._arith(op, ts, args, sx.loc)
        raise UndeclaredSymbol(f"undeclared symbol {op}", head.loc)

    def _atom(self, sx: Atom, env: dict) -> Term:
        if sx.kind == "numeral":
            return num(int(sx.text))
        if sx.kind == "decimal":
            return num(Fraction(sx.text), REAL)
        if sx.kind != "symbol":
            raise ScriptSyntaxError(f"unexpected {sx.kind} {sx.text}", sx.loc)
        name = sx.text
        if name in env:
            return env[name]
        if name == "true":
            return TRUE
        if name == "false":
            return FALSE
        if name in self.s.constructors:
            return self.s.constructors[name]
        sym = self.s.functions.get(name)
        if sym is not None:
            if sym.arity:
                raise ScriptSyntaxError(f"{name} expects {sym.arity} arguments", sx.loc)
            return App(sym, ())
        raise UndeclaredSymbol(f"undeclared symbol {name}", sx.loc)

    def _arity(self, sx, ts, lo, hi=-1):
        hi = lo if hi == -1 else hi
        if len(ts) < lo or (hi is not None and len(ts) > hi):
            raise ScriptSyntaxError(f"wrong number of arguments to {sx[0].text}", sx.loc)

    def _bool(self, t: Term, sx) -> Term:
        if t.sort != BOOL:
            raise SortError(sx.loc, BOOL, t.sort)
        return t

    def _coerce(self, t: Term, sort: Sort, loc: Loc) -> Term:
        if t.sort == sort:
            return t
        if sort == REAL and isinstance(t, Id) and t.sort == INT:
            return num(t.value, REAL)
        raise SortError(loc, sort, t.sort)

    def _unify_sorts(self, ts, sxs, loc) -> list[Term]:
        target = REAL if any(t.sort == REAL for t in ts) else ts[0].sort
        return [self._coerce(t, target, sx.loc) for t, sx in zip(ts, sxs)]

    def _arith(self, op, ts, sxs, loc) -> Term:
        if not ts:
            raise ScriptSyntaxError(f"{op} needs arguments", loc)
        for t, sx in zip(ts, sxs):
            if not t.sort.is_numeric:
                raise SortError(sx.loc, "Int or Real", t.sort)
        if op == "/":
            ts = [self._coerce(t, REAL, sx.loc) for t, sx in zip(ts, sxs)]
            if len(ts) == 2 and all(isinstance(t, Id) for t in ts) and ts[1].value != 0:
                return num(ts[0].value / ts[1].value, REAL)
        elif op in ("div", "mod"):
            if len(ts) != 2:
                raise ScriptSyntaxError(f"{op} takes two arguments", loc)
            ts = [self._coerce(t, INT, sx.loc) for t, sx in zip(ts, sxs)]
        else:
            ts = self._unify_sorts(ts, sxs, loc)
        if op == "-" and len(ts) == 1 and isinstance(ts[0], Id):
            return num(-ts[0].value, ts[0].sort)
        if op == "abs" and len(ts) != 1:
            raise ScriptSyntaxError("abs takes one argument", loc)
        return App(arith_symbol(op, [t.sort for t in ts]), tuple(ts))

    def _apply(self, sym: FunSym, args, env, loc) -> Term:
        if len(args) != sym.arity:
            raise ScriptSyntaxError(f"{sym.name} expects {sym.arity} arguments, got {len(args)}", loc)
        ts = tuple(self._coerce(self.term(a, env), s, a.loc) for a, s in zip(args, sym.arg_sorts))
        return App(sym, ts)

    def _bindings(self, sx, env: dict) -> tuple[list[Var], dict]:
        inner = dict(env)
        vs = []
        for b in _expect_list(sx, "sorted variables"):
            b = _expect_list(b, "(name sort)")
            if len(b) != 2:
                raise ScriptSyntaxError("expected (name sort)", b.loc)
            name = _expect_symbol(b[0], "a variable name")
            if is_reserved_name(name):
                raise ScriptSyntaxError(f"reserved variable name {name}", b.loc)
            v = Var(name, self.sort(b[1]))
            inner[name] = v
            vs.append(v)
        if not vs:
            raise ScriptSyntaxError("empty binder", sx.loc)
        return vs, inner

    def _binder(self, op, sx, env) -> Term:
        if len(sx) != 3:
            raise ScriptSyntaxError(f"malformed {op}", sx.loc)
        vs, inner = self._bindings(sx[1], env)
        body = self._bool(self.term(sx[2], inner), sx[2])
        if op == "forall":
            return Forall(tuple(vs), body)
        if op == "exists":
            return mk_exists(vs, body)
        return Count(tuple(vs), body)

    # -- values

    def value(self, sx, sort: Sort) -> Id:
        t = self.term(sx, {})
        if not isinstance(t, Id):
            raise ScriptSyntaxError(f"expected an id of sort {sort}", sx.loc)
        return self._coerce(t, sort, sx.loc)

    def point(self, sx, sym: FunSym) -> tuple[Id, ...]:
        items = sx.items if isinstance(sx, SList) else (sx,)
        if len(items) != sym.arity:
            raise ScriptSyntaxError(f"{sym.name} expects tuples of {sym.arity} ids", sx.loc)
        return tuple(self.value(i, s) for i, s in zip(items, sym.arg_sorts))

    # -- commands

    def command(self, sx) -> Optional[Command]:
        sx = _expect_list(sx, "a command")
        if not sx.items:
            raise ScriptSyntaxError("empty command", sx.loc)
        head = _expect_symbol(sx[0], "a command name")
        args = sx.items[1:]
        if head in _UNSUPPORTED:
            raise UnsupportedCommand(f"'{head}' is not supported", sx.loc)
        if head in _PREAMBLE or head in _TRAILER - {"check-sat", "get-model"}:
            return Passthrough(head, sexpr_text(sx))
        if head == "check-sat":
            return CheckSat()
        if head == "get-model":
            return GetModel()
        if head == "echo":
            if len(args) != 1 or args[0].kind != "string":
                raise ScriptSyntaxError("echo takes a string", sx.loc)
            return Echo(args[0].text)
        if head == "x-ground":
            return XGround()
        if head == "declare-datatype":
            if len(args) != 2:
                raise ScriptSyntaxError("malformed declare-datatype", sx.loc)
            return self._datatype(args[0], args[1])
        if head == "declare-datatypes":
            return self._datatypes(sx, args)
        if head == "declare-fun":
            if len(args) != 3:
                raise ScriptSyntaxError("malformed declare-fun", sx.loc)
            name = self._fresh_name(args[0])
            sorts = tuple(self.sort(a) for a in _expect_list(args[1], "argument sorts"))
            sym = FunSym(name, sorts, self.sort(args[2]))
            self.s.functions[name] = sym
            return DeclareFun(sym)
        if head == "declare-const":
            if len(args) != 2:
                raise ScriptSyntaxError("malformed declare-const", sx.loc)
            sym = FunSym(self._fresh_name(args[0]), (), self.sort(args[1]))
            self.s.functions[sym.name] = sym
            return DeclareFun(sym, const=True)
        if head == "define-fun":
            return self._define(sx, args)
        if head == "assert":
            if len(args) != 1:
                raise ScriptSyntaxError("assert takes one term", sx.loc)
            t = self.term(args[0], {})
            return Assert(self._bool(t, args[0]))
        if head == "x-interpret-const":
            return self._interpret_const(sx, args)
        if head == "x-interpret-pred":
            return self._interpret_pred(sx, args)
        if head == "x-interpret-fun":
            return self._interpret_fun(sx, args)
        raise UnsupportedCommand(f"unknown command '{head}'", sx.loc)

    def _datatype(self, name_sx, ctors_sx) -> DeclareDatatype:
        name = _expect_symbol(name_sx, "a sort name")
        if name in self.s.sorts or is_reserved_name(name):
            raise ScriptSyntaxError(f"sort {name} already declared", name_sx.loc)
        sort = Sort(name)
        ids = []
        for c in _expect_list(ctors_sx, "constructors"):
            if isinstance(c, SList):
                if len(c) != 1:
                    raise UnsupportedCommand("only nullary constructors are supported", c.loc)
                c = c[0]
            cname = self._fresh_name(c)
            if cname in (i.value for i in ids):
                raise ScriptSyntaxError(f"duplicate constructor {cname}", c.loc)
            ids.append(Id(cname, sort))
        if not ids:
            raise ScriptSyntaxError(f"datatype {name} has no constructors", ctors_sx.loc)
        self.s.sorts[name] = sort
        self.s.datatypes[sort] = tuple(ids)
        for i in ids:
            self.s.constructors[i.value] = i
        return DeclareDatatype(sort, tuple(ids))

    def _datatypes(self, sx, args):
        if len(args) != 2 or len(args[0]) != len(args[1]):
            raise ScriptSyntaxError("malformed declare-datatypes", sx.loc)
        out = []
        for decl, ctors in zip(args[0], args[1]):
            decl = _expect_list(decl, "(name 0)")
            if len(decl) != 2 or decl[1].text != "0":
                raise UnsupportedCommand("parametric datatypes are not supported", decl.loc)
            out.append(self._datatype(decl[0], ctors))
        return out

    def _define(self, sx, args) -> DefineFun:
        if len(args) != 4:
            raise ScriptSyntaxError("malformed define-fun", sx.loc)
        name = self._fresh_name(args[0])
        params = []
        env = {}
        for b in _expect_list(args[1], "parameters"):
            b = _expect_list(b, "(name sort)")
            pname = _expect_symbol(b[0], "a parameter name")
            if is_reserved_name(pname):
                raise ScriptSyntaxError(f"reserved parameter name {pname}", b.loc)
            v = Var(pname, self.sort(b[1]))
            params.append(v)
            env[pname] = v
        result = self.sort(args[2])
        body = self._coerce(self.term(args[3], env), result, args[3].loc)
        sym = FunSym(name, tuple(p.sort for p in params), result)
        self.s.functions[name] = sym
        self.s.macros[sym] = (tuple(params), body)
        return DefineFun(sym, tuple(params), body)

    def _interpretable(self, sx) -> FunSym:
        sym = self.function(sx)
        if sym in self.s.macros:
            raise ScriptSyntaxError(f"{sym.name} is defined by define-fun", sx.loc)
        if sym in self.s.interps:
            raise ScriptSyntaxError(f"{sym.name} is already interpreted", sx.loc)
        return sym

    def _interpret_const(self, sx, args) -> XInterpretConst:
        if len(args) != 2:
            raise ScriptSyntaxError("malformed x-interpret-const", sx.loc)
        sym = self._interpretable(args[0])
        if sym.arity:
            raise ScriptSyntaxError(f"{sym.name} is not a constant", args[0].loc)
        v = self.value(args[1], sym.result)
        self.s.interps[sym] = Interpretation({(): v})
        return XInterpretConst(sym, v)

    def _interpret_pred(self, sx, args) -> XInterpretPred:
        if len(args) not in (2, 3):
            raise ScriptSyntaxError("malformed x-interpret-pred", sx.loc)
        sym = self._interpretable(args[0])
        if not sym.is_predicate:
            raise SortError(args[0].loc, BOOL, sym.result)
        atoms = self._tagged(args[1], "x-set", sym)
        unknown = self._tagged(args[2], "x-unknown", sym) if len(args) == 3 else ()
        both = set(atoms) & set(unknown)
        if both:
            raise ScriptSyntaxError(f"tuple listed as both true and unknown for {sym.name}", sx.loc)
        self.s.interps[sym] = Interpretation({a: TRUE for a in atoms}, FALSE, frozenset(unknown))
        return XInterpretPred(sym, atoms, unknown)

    def _tagged(self, sx, tag, sym) -> tuple:
        sx = _expect_list(sx, f"({tag} ...)")
        if not sx.items or getattr(sx[0], "text", None) != tag:
            raise ScriptSyntaxError(f"expected ({tag} ...)", sx.loc)
        out = {}
        for p in sx.items[1:]:
            out.setdefault(self.point(p, sym))
        return tuple(out)

    def _interpret_fun(self, sx, args) -> XInterpretFun:
        if len(args) not in (2, 3):
            raise ScriptSyntaxError("malformed x-interpret-fun", sx.loc)
        sym = self._interpretable(args[0])
        m = _expect_list(args[1], "(x-mapping ...)")
        if not m.items or getattr(m[0], "text", None) != "x-mapping":
            raise ScriptSyntaxError("expected (x-mapping ...)", m.loc)
        entries = list(m.items[1:])
        else_sx = None
        if len(args) == 3:
            else_sx = args[2]
        elif entries and isinstance(entries[-1], SList) and entries[-1].items \
                and getattr(entries[-1][0], "text", None) == "x-else":
            else_sx = entries.pop()
        mapping: dict = {}
        for e in entries:
            e = _expect_list(e, "((args) value)")
            if len(e) != 2:
                raise ScriptSyntaxError("expected ((args) value)", e.loc)
            k = self.point(e[0], sym)
            v = self.value(e[1], sym.result)
            if mapping.get(k, v) != v:
                raise ScriptSyntaxError(f"conflicting values for {sym.name}{k}", e.loc)
            mapping[k] = v
        default = None
        if else_sx is not None:
            else_sx = _expect_list(else_sx, "(x-else value)")
            if len(else_sx) != 2 or getattr(else_sx[0], "text", None) != "x-else":
                raise ScriptSyntaxError("expected (x-else value)", else_sx.loc)
            default = self.value(else_sx[1], sym.result)
        self.s.interps[sym] = Interpretation(mapping, default)
        return XInterpretFun(sym, tuple(mapping.items()), default)


def parse(text: str) -> Script:
    reader = _Reader()
    for sx in sexpr.read_all(text):
        cmd = reader.command(sx)
        if isinstance(cmd, list):
            reader.s.commands.extend(cmd)
        else:
            reader.s.commands.append(cmd)
    return reader.s


def parse_term(text: str, script: Script, env: dict = None) -> Term:
    """Read one term in the signature of ``script``."""
    reader = _Reader()
    reader.s = script
    (sx,) = sexpr.read_all(text)
    return reader.term(sx, dict(env or {}))


# ---------------------------------------------------------- preprocessing


def inline_macros(term: Term, macros: dict, fresh: Fresh) -> Term:
    """Replace applications of ``define-fun`` symbols by their bodies."""
    if not macros:
        return term

    def walk(t: Term) -> Term:
        kids = t.children()
        if kids:
            t = rebuild(t, [walk(c) for c in kids])
        if isinstance(t, App) and t.sym in macros:
            params, body = macros[t.sym]
            body = walk(_freshen(body, fresh))
            return substitute(body, {p.name: a for p, a in zip(params, t.args)}) if params else body
        return t

    return walk(term)


def _freshen(t: Term, fresh: Fresh) -> Term:
    """Give every binder a fresh name so substitution cannot capture."""
    if isinstance(t, (Forall, Count)):
        new = tuple(fresh.var(v.name, v.sort) for v in t.vars)
        body = substitute(t.body, {v.name: n for v, n in zip(t.vars, new)})
        return type(t)(new, _freshen(body, fresh))
    kids = t.children()
    return rebuild(t, [_freshen(c, fresh) for c in kids]) if kids else t


def prepare(term: Term, structure: PartialStructure, macros: dict = None,
            fresh: Fresh = None) -> Term:
    """Bring a formula into the form the grounder expects: macros inlined,
    ``ite`` lifted, arguments of interpreted symbols unnested, binders
    renamed apart, simplified."""
    fresh = fresh or Fresh()
    t = inline_macros(term, macros or {}, fresh)
    t = lift_ite(t)
    interpreted = set(structure.interps)
    t = unnest(t, needs_simple=lambda sym: sym in interpreted, fresh=fresh)
    t = rename_shadowed(t, fresh)
    return simplify(t)


def preprocess(script: Script) -> Script:
    """Prepared copy of ``script``: every assertion goes through ``prepare``."""
    fresh = Fresh()
    structure = script.structure
    commands = []
    for c in script.commands:
        if isinstance(c, Assert):
            c = Assert(prepare(c.term, structure, script.macros, fresh))
        commands.append(c)
    return replace(script, commands=commands, preprocessed=True)

