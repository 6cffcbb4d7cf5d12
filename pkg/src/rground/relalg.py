"""In-memory relational algebra over rows of terms.

A ``Relation`` is a set of rows under named attributes.  A cell is a ``Term``
or ``NULL``.  Rows may be *parametric*: a cell can contain free variables
(named ``?0``, ``?1``, ... after canonicalization) ranging over an infinite
sort, and such a row stands for all its instances.  That is how the set of all
valuations of ``x:Int`` is represented, by the single row ``(?0)``.

Selections and joins on parametric rows work by unification, so an equality
such as ``x ≗ 5`` pins ``?0`` to ``5`` and the result becomes finite.  When a
condition cannot be decided on a parametric row the operation either raises
``SymbolicSelection`` or, with ``approximate=True``, keeps the row.  The
second mode over-approximates and is only meant for x-generators, where a
superset is sound.

Set semantics everywhere: no operation ever produces duplicate rows.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

from . import simplify as S
from .printer import term_to_smtlib
from .terms import (
    FALSE,
    TRUE,
    App,
    FunSym,
    Id,
    Interpretation,
    PartialStructure,
    Term,
    Var,
    apply_builtin,
    arith_symbol,
    compare_ids,
    free_variables,
    substitute,
)


class RelationError(Exception):
    pass


class UnknownAttribute(RelationError):
    pass


class AttributeClash(RelationError):
    pass


class SchemaMismatch(RelationError):
    pass


class SymbolicSelection(RelationError):
    """A condition could not be decided on a parametric (infinite) relation."""


class SymbolicAggregation(RelationError):
    pass


class InfiniteLeft(RelationError):
    pass


class InfiniteRelation(RelationError):
    pass


class _Null:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "NULL"

    def __reduce__(self):
        return (_Null, ())


NULL = _Null()


def _closed(cell) -> bool:
    return cell is NULL or type(cell) is Id or cell.is_closed


def _row_closed(row) -> bool:
    for c in row:
        if c is NULL or type(c) is Id:
            continue
        if not c.is_closed:
            return False
    return True


def cell_text(cell) -> str:
    return "NULL" if cell is NULL else term_to_smtlib(cell)


# ------------------------------------------------------- parametric rows


def _row_vars(row) -> list[Var]:
    seen: dict[str, Var] = {}
    for c in row:
        if c is not NULL and not c.is_closed:
            for v in free_variables(c):
                seen.setdefault(v.name, v)
    return list(seen.values())


def _canon(row: tuple) -> tuple:
    """Rename the parameters of a row to ``?0, ?1, ...`` in order of first
    occurrence so that equal parametric rows compare equal."""
    if _row_closed(row):
        return row
    vs = _row_vars(row)
    if all(v.name == f"?{i}" for i, v in enumerate(vs)):
        return row
    mapping = {v.name: Var(f"?{i}", v.sort) for i, v in enumerate(vs)}
    return tuple(c if c is NULL else substitute(c, mapping) for c in row)


def _rename_apart(row: tuple, tag: str) -> tuple:
    if _row_closed(row):
        return row
    mapping = {v.name: Var(f"?{tag}{v.name[1:]}", v.sort) for v in _row_vars(row)}
    return tuple(c if c is NULL else substitute(c, mapping) for c in row)


class _Unknown:
    def __repr__(self):
        return "UNKNOWN"


UNKNOWN = _Unknown()


def _resolve(t: Term, s: Mapping[str, Term]) -> Term:
    if not s or t.is_closed:
        return t
    prev = None
    while prev is not t and not t.is_closed and (t.free_names & s.keys()):
        prev = t
        t = substitute(t, s)
    return t


def _rigid(t: Term) -> bool:
    """Whether every instance keeps the head of ``t``: simplification never
    rewrites an id or an uninterpreted application."""
    return isinstance(t, Id) or (isinstance(t, App) and not t.sym.builtin)


def unify(a: Term, b: Term, s: dict):
    """Syntactic unification of parametric terms.  Returns an extended
    substitution, ``None`` when the terms can never be equal, or ``UNKNOWN``
    when equality depends on simplification of an instance (arithmetic,
    comparisons) that unification cannot predict."""
    a = _resolve(a, s)
    b = _resolve(b, s)
    if a == b:
        return s
    if isinstance(a, Var):
        return _bind(a, b, s)
    if isinstance(b, Var):
        return _bind(b, a, s)
    if a.is_closed and b.is_closed:
        return None
    if isinstance(a, App) and isinstance(b, App) and a.sym == b.sym and not a.sym.builtin:
        unknown = False
        for x, y in zip(a.args, b.args):
            r = unify(x, y, s)
            if r is None:
                return None
            if r is UNKNOWN:
                unknown = True
            else:
                s = r
        return UNKNOWN if unknown else s
    if _rigid(a) and _rigid(b):
        return None
    return UNKNOWN


def _bind(v: Var, t: Term, s: dict):
    if v.sort != t.sort:
        return None
    if v.name in t.free_names:
        return None if _rigid(t) else UNKNOWN
    out = dict(s)
    out[v.name] = t
    return out


def _apply(row: tuple, s: Mapping[str, Term]) -> tuple:
    if not s:
        return row
    out = []
    for c in row:
        if c is NULL or c.is_closed or not (c.free_names & s.keys()):
            out.append(c)
        else:
            out.append(S.simplify(_resolve(c, s)))
    return tuple(out)


# -------------------------------------------------------------- relation


class Relation:
    """A set of rows over named attributes.  Immutable."""

    __slots__ = ("attrs", "rows", "_finite", "_pos")

    def __init__(self, attrs: Sequence[str], rows: Iterable[tuple] = ()):
        self.attrs = tuple(attrs)
        if len(set(self.attrs)) != len(self.attrs):
            raise AttributeClash(f"duplicate attribute in {self.attrs}")
        self.rows = rows if isinstance(rows, frozenset) else frozenset(rows)
        self._finite = None
        self._pos = None

    @classmethod
    def _canonical(cls, attrs, rows) -> "Relation":
        return cls(attrs, frozenset(_canon(r) for r in rows))

    def is_finite(self) -> bool:
        if self._finite is None:
            self._finite = all(_row_closed(r) for r in self.rows)
        return self._finite

    def index(self, attr: str) -> int:
        if self._pos is None:
            self._pos = {a: i for i, a in enumerate(self.attrs)}
        try:
            return self._pos[attr]
        except KeyError:
            raise UnknownAttribute(f"{attr} not in {self.attrs}") from None

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __bool__(self) -> bool:
        return bool(self.rows)

    def rows_as(self, attrs: Sequence[str]) -> set[tuple]:
        """Rows reordered to ``attrs`` (a permutation of this relation's attributes)."""
        if set(attrs) != set(self.attrs):
            raise SchemaMismatch(f"{tuple(attrs)} vs {self.attrs}")
        if tuple(attrs) == self.attrs:
            return set(self.rows)
        idx = [self.index(a) for a in attrs]
        return {tuple(r[i] for i in idx) for r in self.rows}

    def column(self, attr: str) -> list:
        i = self.index(attr)
        return [r[i] for r in self.rows]

    def records(self) -> list[dict]:
        return [dict(zip(self.attrs, r)) for r in self.rows]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Relation) or set(self.attrs) != set(other.attrs):
            return NotImplemented if not isinstance(other, Relation) else False
        return self.rows_as(self.attrs) == other.rows_as(self.attrs)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Relation({self.attrs}, {len(self.rows)} rows)"

    def dump(self, label: str = None) -> str:
        """Debug text: optional ``; label`` line, header of attribute names,
        one tab-separated row per line, sorted."""
        lines = []
        if label is not None:
            lines.append(f"; {label}")
        lines.append("\t".join(self.attrs))
        lines.extend(sorted("\t".join(cell_text(c) for c in r) for r in self.rows))
        return "\n".join(lines) + "\n"


def parse_dump(text: str) -> list[tuple[Optional[str], tuple[str, ...], set[tuple[str, ...]]]]:
    """Read back ``Relation.dump`` blocks (separated by blank lines) as text."""
    out = []
    for block in text.strip().split("\n\n"):
        lines = [ln for ln in block.split("\n") if ln != ""]
        if not lines:
            continue
        label = None
        if lines[0].startswith("; "):
            label, lines = lines[0][2:], lines[1:]
        header = tuple(lines[0].split("\t")) if lines and lines[0] else ()
        rows = {tuple(ln.split("\t")) if ln else () for ln in lines[1:]}
        out.append((label, header, rows))
    return out


# ------------------------------------------------------------ constructors


def empty(attrs: Sequence[str] = ()) -> Relation:
    return Relation(attrs, frozenset())


def unit() -> Relation:
    return Relation((), frozenset({()}))


def singleton(attr: str, term: Term) -> Relation:
    return Relation((attr,), frozenset({(term,)}))


def all_valuations(vars: Sequence[Var], structure: PartialStructure) -> Relation:
    """Every valuation of ``vars``: finite sorts are enumerated, infinite ones
    become parameters."""
    columns = []
    k = 0
    for v in vars:
        u = structure.universe(v.sort)
        if u is None:
            columns.append((Var(f"?{k}", v.sort),))
            k += 1
        else:
            columns.append(u)
    return Relation([v.name for v in vars], frozenset(itertools.product(*columns)))


# ------------------------------------------------------------ comparisons


class CompareExpr:
    """Comparison language: evaluates to true/false on a row."""

    def attrs(self) -> set[str]:
        return set()


@dataclass(frozen=True)
class Attr:
    name: str


@dataclass(frozen=True)
class Const:
    term: Term


def _operand_attrs(x) -> set[str]:
    return {x.name} if isinstance(x, Attr) else set()


@dataclass(frozen=True)
class TrueC(CompareExpr):
    pass


@dataclass(frozen=True)
class Eq(CompareExpr):
    """Syntactic term equality."""

    left: object
    right: object

    def attrs(self):
        return _operand_attrs(self.left) | _operand_attrs(self.right)


@dataclass(frozen=True)
class Order(CompareExpr):
    """``<̂ ≤̂ ≥̂ >̂``: holds only on two numeric literals."""

    op: str
    left: object
    right: object

    def attrs(self):
        return _operand_attrs(self.left) | _operand_attrs(self.right)


@dataclass(frozen=True)
class IsId(CompareExpr):
    operand: object

    def attrs(self):
        return _operand_attrs(self.operand)


@dataclass(frozen=True)
class NotC(CompareExpr):
    arg: CompareExpr

    def attrs(self):
        return self.arg.attrs()


@dataclass(frozen=True)
class AndC(CompareExpr):
    args: tuple

    def attrs(self):
        return set().union(*(a.attrs() for a in self.args)) if self.args else set()


@dataclass(frozen=True)
class OrC(CompareExpr):
    args: tuple

    def attrs(self):
        return set().union(*(a.attrs() for a in self.args)) if self.args else set()


TRUE_C = TrueC()


def cmp(op: str, left, right) -> CompareExpr:
    """``≗`` for ``=``, the ordered operators otherwise."""
    return Eq(left, right) if op == "=" else Order(op, left, right)


def equi(pairs: Iterable[tuple[str, str]]) -> CompareExpr:
    pairs = [Eq(Attr(a), Attr(b)) for a, b in pairs]
    if not pairs:
        return TRUE_C
    return pairs[0] if len(pairs) == 1 else AndC(tuple(pairs))


def _operand(x, get):
    if isinstance(x, Attr):
        return get(x.name)
    if isinstance(x, Const):
        return x.term
    raise TypeError(f"bad operand {x!r}")


def _holds(c: CompareExpr, get) -> bool:
    """Evaluation on a closed row."""
    if isinstance(c, Eq):
        a, b = _operand(c.left, get), _operand(c.right, get)
        return a is not NULL and b is not NULL and a == b
    if isinstance(c, IsId):
        a = _operand(c.operand, get)
        return isinstance(a, Id)
    if isinstance(c, Order):
        a, b = _operand(c.left, get), _operand(c.right, get)
        return (isinstance(a, Id) and isinstance(b, Id) and a.is_numeral and b.is_numeral
                and compare_ids(c.op, a, b))
    if isinstance(c, NotC):
        return not _holds(c.arg, get)
    if isinstance(c, AndC):
        return all(_holds(a, get) for a in c.args)
    if isinstance(c, OrC):
        return any(_holds(a, get) for a in c.args)
    if isinstance(c, TrueC):
        return True
    raise TypeError(f"bad condition {c!r}")


class _Undecided(Exception):
    pass


def _always_id(t: Term):
    """True/False when id-ness of every instance is known, else ``UNKNOWN``."""
    if isinstance(t, (Id, Var)):
        return True
    if isinstance(t, App):
        if not t.sym.builtin:
            return False
        if t.sym.name in ("/", "div", "mod"):
            return UNKNOWN
        for a in t.args:
            r = _always_id(a)
            if r is not True:
                return UNKNOWN
        return True
    return UNKNOWN


def _sols(c: CompareExpr, get, s: dict, approx: bool) -> list[dict]:
    """Substitutions (extending ``s``) under which a parametric row satisfies
    ``c``.  An undecidable case keeps ``s`` when approximating, else raises."""

    def unknown():
        if approx:
            return [s]
        raise _Undecided()

    if isinstance(c, TrueC):
        return [s]
    if isinstance(c, Eq):
        a, b = _operand(c.left, get), _operand(c.right, get)
        if a is NULL or b is NULL:
            return []
        r = unify(a, b, s)
        if r is None:
            return []
        if r is UNKNOWN:
            return unknown()
        return [r]
    if isinstance(c, IsId):
        a = _operand(c.operand, get)
        if a is NULL:
            return []
        a = _resolve(a, s)
        if a.is_closed:
            return [s] if isinstance(a, Id) else []
        r = _always_id(a)
        if r is UNKNOWN:
            return unknown()
        return [s] if r else []
    if isinstance(c, Order):
        a, b = _operand(c.left, get), _operand(c.right, get)
        if a is NULL or b is NULL:
            return []
        a, b = _resolve(a, s), _resolve(b, s)
        if a.is_closed and b.is_closed:
            a, b = S.simplify(a), S.simplify(b)
            ok = (isinstance(a, Id) and isinstance(b, Id) and a.is_numeral and b.is_numeral
                  and compare_ids(c.op, a, b))
            return [s] if ok else []
        return unknown()
    if isinstance(c, NotC):
        try:
            inner = _sols(c.arg, get, s, False)
        except _Undecided:
            return unknown()
        if not inner:
            return [s]
        if any(r == s for r in inner):
            return []
        return unknown()
    if isinstance(c, AndC):
        acc = [s]
        for a in c.args:
            nxt = []
            for s2 in acc:
                nxt.extend(_sols(a, get, s2, approx))
            acc = nxt
            if not acc:
                break
        return acc
    if isinstance(c, OrC):
        out = []
        for a in c.args:
            r = _sols(a, get, s, approx)
            if any(x == s for x in r):
                return [s]
            out.extend(r)
        return out
    raise TypeError(f"bad condition {c!r}")


def _check_attrs(names: Iterable[str], rel_attrs: Sequence[str]) -> None:
    missing = set(names) - set(rel_attrs)
    if missing:
        raise UnknownAttribute(f"{sorted(missing)} not in {tuple(rel_attrs)}")


def _filter_rows(attrs, rows, cond: CompareExpr, approximate: bool) -> set:
    pos = {a: i for i, a in enumerate(attrs)}
    out = set()
    for row in rows:
        get = lambda n, row=row: row[pos[n]]  # noqa: E731
        if _row_closed(row):
            if _holds(cond, get):
                out.add(row)
            continue
        try:
            subs = _sols(cond, get, {}, approximate)
        except _Undecided:
            raise SymbolicSelection(f"cannot decide selection on parametric row") from None
        for s in subs:
            out.add(_canon(_apply(row, s)))
    return out


def select(rel: Relation, cond: CompareExpr, approximate: bool = False) -> Relation:
    _check_attrs(cond.attrs(), rel.attrs)
    if isinstance(cond, TrueC):
        return rel
    return Relation(rel.attrs, _filter_rows(rel.attrs, rel.rows, cond, approximate))


# ---------------------------------------------------------- construction


class ConstructExpr:
    """Construction language: evaluates to a (simplified) term on a row."""

    def attrs(self) -> set[str]:
        return set()


@dataclass(frozen=True)
class Col(ConstructExpr):
    name: str

    def attrs(self):
        return {self.name}


@dataclass(frozen=True)
class Lit(ConstructExpr):
    term: Term


@dataclass(frozen=True)
class IfNull(ConstructExpr):
    """The cell of ``name`` if not null, ``default`` otherwise."""

    name: str
    default: Term

    def attrs(self):
        return {self.name}


@dataclass(frozen=True)
class Build(ConstructExpr):
    """``op`` is one of not, and, or, ite, +, and the comparisons."""

    op: str
    args: tuple

    def attrs(self):
        return set().union(*(a.attrs() for a in self.args)) if self.args else set()


def _construct(e: ConstructExpr, get) -> Term:
    if isinstance(e, Col):
        v = get(e.name)
        if v is NULL:
            raise RelationError(f"null cell {e.name} used in construction")
        return v
    if isinstance(e, Lit):
        return e.term
    if isinstance(e, IfNull):
        v = get(e.name)
        return e.default if v is NULL else v
    if isinstance(e, Build):
        args = [_construct(a, get) for a in e.args]
        return build(e.op, args)
    raise TypeError(f"bad construction {e!r}")


def build(op: str, args: Sequence[Term]) -> Term:
    if op == "not":
        return S.mk_not(args[0])
    if op == "and":
        return S.mk_and(args)
    if op == "or":
        return S.mk_or(args)
    if op == "ite":
        return S.mk_ite(*args)
    if op == "+":
        return S.mk_app(arith_symbol("+", [a.sort for a in args]), args)
    if op in ("<", "<=", "=", ">=", ">"):
        return S.mk_compare(op, args[0], args[1])
    raise RelationError(f"unknown construction operator {op}")


# ---------------------------------------------------------------- views


class ConstructiveView:
    """The interpretation relation of a function symbol, computed on demand.

    Attributes are the argument attributes followed by the value attribute.
    A row's value is the interpreted value where the structure defines it,
    the built-in result for arithmetic, and the constructed application
    otherwise.
    """

    def __init__(self, symbol: FunSym, interp: Optional[Interpretation] = None,
                 key_attrs: Sequence[str] = None, value_attr: str = None):
        self.symbol = symbol
        self.interp = interp
        self.key_attrs = tuple(key_attrs) if key_attrs is not None else tuple(
            f"#a{i + 1}" for i in range(symbol.arity))
        self.value_attr = value_attr or f"#{symbol.name}"
        self.attrs = self.key_attrs + (self.value_attr,)

    def is_finite(self) -> bool:
        return False

    def value(self, keys: tuple) -> Term:
        if all(isinstance(k, Id) for k in keys):
            if self.symbol.builtin:
                v = apply_builtin(self.symbol, keys)
                if v is not None:
                    return v
            elif self.interp is not None:
                v = self.interp.lookup(keys)
                if v is not None:
                    return v
        return S.mk_app(self.symbol, keys)

    def rows_for(self, keys: tuple, approximate: bool) -> list[tuple[dict, Term]]:
        """(substitution, value) pairs for possibly parametric keys."""
        if all(k.is_closed for k in keys):
            return [({}, self.value(keys))]
        if self.symbol.builtin or self.interp is None:
            return [({}, S.mk_app(self.symbol, keys))]
        if not approximate:
            raise SymbolicSelection(f"lookup of {self.symbol.name} on parametric keys")
        out = []
        points = list(self.interp.mapping.items()) + [(p, None) for p in self.interp.unknown]
        for point, v in points:
            s: dict = {}
            for k, p in zip(keys, point):
                s = unify(k, p, s)
                if s is None or s is UNKNOWN:
                    break
            if s is None:
                continue
            if s is UNKNOWN:
                s = {}
            out.append((s, v if v is not None else S.mk_app(self.symbol, point)))
        generic = self.interp.default if self.interp.default is not None else S.mk_app(self.symbol, keys)
        out.append(({}, generic))
        return out

    def materialize(self, structure: PartialStructure) -> Relation:
        universes = [structure.universe(s) for s in self.symbol.arg_sorts]
        if any(u is None for u in universes):
            raise InfiniteRelation(f"{self.symbol.name} has an infinite domain")
        rows = {keys + (self.value(keys),) for keys in itertools.product(*universes)}
        return Relation(self.attrs, rows)

    def __repr__(self):
        return f"ConstructiveView({self.symbol.name})"


# -------------------------------------------------------------- products


def _merge(p: tuple, q: tuple, shared_p: Sequence[int], shared_q: Sequence[int],
           q_rest: Sequence[int], approximate: bool) -> list[tuple]:
    """Join two rows (either may be parametric) on shared positions."""
    if not _row_closed(q):
        q = _rename_apart(q, "R")
    if not _row_closed(p):
        p = _rename_apart(p, "L")
    s: dict = {}
    for i, j in zip(shared_p, shared_q):
        a, b = p[i], q[j]
        if a is NULL or b is NULL:
            return []
        r = unify(a, b, s)
        if r is None:
            return []
        if r is UNKNOWN:
            if not approximate:
                raise SymbolicSelection("cannot decide join on parametric rows")
            continue
        s = r
    row = p + tuple(q[j] for j in q_rest)
    return [_canon(_apply(row, s))]


def cross(r: Relation, s: Relation) -> Relation:
    clash = set(r.attrs) & set(s.attrs)
    if clash:
        raise AttributeClash(f"cross product on shared attributes {sorted(clash)}")
    rest = list(range(len(s.attrs)))
    rows = set()
    for p in r.rows:
        for q in s.rows:
            if _row_closed(p) and _row_closed(q):
                rows.add(p + q)
            else:
                rows.update(_merge(p, q, (), (), rest, False))
    return Relation(r.attrs + s.attrs, rows)


def _equi_pairs(cond: CompareExpr, left_attrs, right_attrs):
    """Split ``cond`` into attribute equalities across the two sides and a
    residual condition."""
    parts = cond.args if isinstance(cond, AndC) else (cond,)
    pairs, rest = [], []
    la, ra = set(left_attrs), set(right_attrs)
    for c in parts:
        if isinstance(c, Eq) and isinstance(c.left, Attr) and isinstance(c.right, Attr):
            if c.left.name in la and c.right.name in ra:
                pairs.append((c.left.name, c.right.name))
                continue
            if c.right.name in la and c.left.name in ra:
                pairs.append((c.right.name, c.left.name))
                continue
        if not isinstance(c, TrueC):
            rest.append(c)
    residual = TRUE_C if not rest else (rest[0] if len(rest) == 1 else AndC(tuple(rest)))
    return pairs, residual


def _view_cross(left: Relation, view: ConstructiveView, cond: CompareExpr,
                approximate: bool) -> Relation:
    clash = set(left.attrs) & set(view.attrs)
    if clash:
        raise AttributeClash(f"shared attributes {sorted(clash)}")
    pairs, residual = _equi_pairs(cond, left.attrs, view.attrs)
    keyed = {b: a for a, b in pairs}
    if set(keyed) != set(view.key_attrs):
        raise SymbolicSelection(f"{view!r} must be keyed on all of {view.key_attrs}")
    key_pos = [left.index(keyed[k]) for k in view.key_attrs]
    rows = set()
    for row in left.rows:
        keys = tuple(row[i] for i in key_pos)
        if any(k is NULL for k in keys):
            continue
        for s, value in view.rows_for(keys, approximate):
            out = row + keys + (value,)
            rows.add(_canon(_apply(out, s)) if s or not _row_closed(out) else out)
    result = Relation(left.attrs + view.attrs, rows)
    return select(result, residual, approximate)


def theta_cross(r: Relation, s, cond: CompareExpr, approximate: bool = False) -> Relation:
    """``σθ(r × s)``.  A ``ConstructiveView`` on the right is evaluated by
    lookup, one output row per left row, when θ keys it on left attributes."""
    if isinstance(s, ConstructiveView):
        return _view_cross(r, s, cond, approximate)
    clash = set(r.attrs) & set(s.attrs)
    if clash:
        raise AttributeClash(f"theta product on shared attributes {sorted(clash)}")
    _check_attrs(cond.attrs(), r.attrs + s.attrs)
    pairs, residual = _equi_pairs(cond, r.attrs, s.attrs)
    if pairs and r.is_finite() and s.is_finite():
        joined = _hash_join(r, s, [(r.index(a), s.index(b)) for a, b in pairs], keep_all=True)
        return select(joined, residual, approximate)
    return select(cross(r, s), cond, approximate)


def _hash_join(r: Relation, s: Relation, pos_pairs, keep_all: bool) -> Relation:
    """Equi-join of two finite relations.  ``keep_all`` keeps both copies of the
    joined columns (theta join); otherwise the right copy is dropped."""
    rp = [i for i, _ in pos_pairs]
    sp = [j for _, j in pos_pairs]
    dropped = set() if keep_all else set(sp)
    s_rest = [j for j in range(len(s.attrs)) if j not in dropped]
    attrs = r.attrs + tuple(s.attrs[j] for j in s_rest)
    small, big = (s, r) if len(s.rows) <= len(r.rows) else (r, s)
    index: dict = {}
    if small is s:
        for q in s.rows:
            key = tuple(q[j] for j in sp)
            if NULL not in key:
                index.setdefault(key, []).append(q)
        rows = set()
        for p in r.rows:
            for q in index.get(tuple(p[i] for i in rp), ()):
                rows.add(p + tuple(q[j] for j in s_rest))
    else:
        for p in r.rows:
            key = tuple(p[i] for i in rp)
            if NULL not in key:
                index.setdefault(key, []).append(p)
        rows = set()
        for q in s.rows:
            tail = tuple(q[j] for j in s_rest)
            for p in index.get(tuple(q[j] for j in sp), ()):
                rows.add(p + tail)
    return Relation(attrs, rows)


def natural_join(r: Relation, s: Relation, approximate: bool = False) -> Relation:
    """Rows agreeing on the shared attributes, merged.  Parametric rows are
    joined by unification."""
    shared = [a for a in r.attrs if a in s.attrs]
    if not r.rows or not s.rows:
        return Relation(r.attrs + tuple(a for a in s.attrs if a not in r.attrs), ())
    if r.is_finite() and s.is_finite():
        if not shared:
            return cross(r, s)
        return _hash_join(r, s, [(r.index(a), s.index(a)) for a in shared], keep_all=False)
    sp = [r.index(a) for a in shared]
    sq = [s.index(a) for a in shared]
    q_rest = [j for j, a in enumerate(s.attrs) if a not in shared]
    attrs = r.attrs + tuple(s.attrs[j] for j in q_rest)
    rows: set = set()
    r_closed = [p for p in r.rows if _row_closed(p)]
    r_param = [p for p in r.rows if not _row_closed(p)]
    s_closed = [q for q in s.rows if _row_closed(q)]
    s_param = [q for q in s.rows if not _row_closed(q)]
    if r_closed and s_closed:
        part = natural_join(Relation(r.attrs, r_closed), Relation(s.attrs, s_closed))
        rows.update(part.rows_as(attrs))
    for p in r_param:
        for q in s.rows:
            rows.update(_merge(p, q, sp, sq, q_rest, approximate))
    for q in s_param:
        for p in r_closed:
            rows.update(_merge(p, q, sp, sq, q_rest, approximate))
    return Relation(attrs, rows)


def theta_natural_join(r: Relation, s: Relation, cond: CompareExpr,
                       approximate: bool = False) -> Relation:
    return select(natural_join(r, s, approximate), cond, approximate)


def left_outer_join(r: Relation, s, cond: CompareExpr) -> Relation:
    """Every left row, joined with the matching right rows or padded with
    ``NULL`` on the right attributes."""
    if not r.is_finite():
        raise InfiniteLeft("left outer join needs a finite left side")
    if isinstance(s, ConstructiveView):
        # a view is total: every keyed row matches
        return _view_cross(r, s, cond, False)
    if not s.is_finite():
        raise InfiniteRelation("left outer join needs a finite right side")
    clash = set(r.attrs) & set(s.attrs)
    if clash:
        raise AttributeClash(f"shared attributes {sorted(clash)}")
    _check_attrs(cond.attrs(), r.attrs + s.attrs)
    pairs, residual = _equi_pairs(cond, r.attrs, s.attrs)
    attrs = r.attrs + s.attrs
    pos = {a: i for i, a in enumerate(attrs)}
    pad = (NULL,) * len(s.attrs)
    index: dict = {}
    sp = [s.index(b) for _, b in pairs]
    for q in s.rows:
        index.setdefault(tuple(q[j] for j in sp), []).append(q)
    rp = [r.index(a) for a, _ in pairs]
    rows = set()
    for p in r.rows:
        matched = False
        for q in index.get(tuple(p[i] for i in rp), ()):
            row = p + q
            if _holds(residual, lambda n, row=row: row[pos[n]]):
                rows.add(row)
                matched = True
        if not matched:
            rows.add(p + pad)
    return Relation(attrs, rows)


def union(r: Relation, s: Relation) -> Relation:
    if set(r.attrs) != set(s.attrs):
        raise SchemaMismatch(f"union of {r.attrs} and {s.attrs}")
    if not s.rows:
        return r
    if not r.rows:
        return Relation(r.attrs, s.rows_as(r.attrs))
    return Relation(r.attrs, r.rows | s.rows_as(r.attrs))


def project(rel: Relation, keep: Sequence[str]) -> Relation:
    _check_attrs(keep, rel.attrs)
    if tuple(keep) == rel.attrs:
        return rel
    idx = [rel.index(a) for a in keep]
    if rel.is_finite():
        return Relation(keep, {tuple(r[i] for i in idx) for r in rel.rows})
    return Relation._canonical(keep, (tuple(r[i] for i in idx) for r in rel.rows))


def rename(rel: Relation, old: str, new: str) -> Relation:
    if old == new:
        return rel
    if new in rel.attrs:
        raise AttributeClash(new)
    return Relation(tuple(new if a == old else a for a in rel.attrs), rel.rows)


def project_extend(rel: Relation, keep: Sequence[str], new_attr: str,
                   expr: ConstructExpr) -> Relation:
    """``Π_{keep | new_attr: expr}``: keeps ``keep`` and appends the
    simplified value of ``expr``; duplicates collapse."""
    _check_attrs(list(keep) + sorted(expr.attrs()), rel.attrs)
    if new_attr in keep:
        raise AttributeClash(new_attr)
    idx = [rel.index(a) for a in keep]
    pos = {a: i for i, a in enumerate(rel.attrs)}
    rows = set()
    finite = rel.is_finite()
    if isinstance(expr, Lit):
        t = expr.term
        for r in rel.rows:
            rows.add(tuple(r[i] for i in idx) + (t,))
    elif isinstance(expr, Col):
        j = pos[expr.name]
        for r in rel.rows:
            rows.add(tuple(r[i] for i in idx) + (r[j],))
    else:
        for r in rel.rows:
            rows.add(tuple(r[i] for i in idx) + (_construct(expr, lambda n, r=r: r[pos[n]]),))
    attrs = tuple(keep) + (new_attr,)
    if finite:
        return Relation(attrs, rows)
    return Relation._canonical(attrs, rows)


def _agg_sort_key(t: Term):
    # ids first, so folded constants lead: 1 + 2 + f(3) gives 3 + f(3)
    return (not isinstance(t, Id), term_to_smtlib(t))


def project_aggregate(rel: Relation, group: Sequence[str], new_attr: str, op: str,
                      expr: ConstructExpr) -> Relation:
    """One row per distinct ``group`` key with the ``op``-aggregation
    (``+``, ``and`` or ``or``) of ``expr`` over the group's rows.  Operands are
    combined in ascending order of their text, then simplified."""
    _check_attrs(list(group) + sorted(expr.attrs()), rel.attrs)
    if op not in ("+", "and", "or"):
        raise RelationError(f"unknown aggregate {op}")
    if not rel.is_finite():
        raise SymbolicAggregation("aggregation over a parametric relation")
    idx = [rel.index(a) for a in group]
    pos = {a: i for i, a in enumerate(rel.attrs)}
    groups: dict[tuple, list[Term]] = {}
    for r in rel.rows:
        v = _construct(expr, lambda n, r=r: r[pos[n]])
        groups.setdefault(tuple(r[i] for i in idx), []).append(v)
    rows = set()
    for key, values in groups.items():
        if op == "and" and FALSE in values:
            rows.add(key + (FALSE,))
            continue
        if op == "or" and TRUE in values:
            rows.add(key + (TRUE,))
            continue
        values.sort(key=_agg_sort_key)
        rows.add(key + (build(op, values),))
    return Relation(tuple(group) + (new_attr,), rows)


def check_functional_dependency(rel: Relation, frm: Sequence[str], to: Sequence[str]) -> bool:
    if not rel.is_finite():
        raise InfiniteRelation("functional dependency check needs a finite relation")
    fi = [rel.index(a) for a in frm]
    ti = [rel.index(a) for a in to]
    seen: dict = {}
    for r in rel.rows:
        k = tuple(r[i] for i in fi)
        v = tuple(r[i] for i in ti)
        if seen.setdefault(k, v) != v:
            return False
    return True
