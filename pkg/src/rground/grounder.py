"""Grounding relations and x-generators.

``Grounder.ground`` computes the G, true-or-unknown (TU) and false-or-unknown
(UF) grounding relations of a term for a valuation relation ``V`` by
structural recursion.  ``Grounder.xgen`` computes the x-generators used to
instantiate binders.  Every grounding relation has the attributes of ``V``
followed by one fresh grounding attribute.

X-generators over infinite sorts are computed on parametric relations (see
``relalg``).  Whenever a rule cannot be evaluated there, the x-generator falls
back to ``X``, the set of all valuations, which is always sound.
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Union

from . import relalg as R
from .interp import InfiniteTU, predicate_tu_relation
from .relalg import (
    NULL,
    AndC,
    Attr,
    Build,
    Col,
    Const,
    ConstructiveView,
    Eq,
    IfNull,
    IsId,
    Lit,
    NotC,
    OrC,
    Relation,
)
from .simplify import mk_forall, simplify
from .terms import (
    BOOL,
    FALSE,
    TRUE,
    And,
    App,
    Compare,
    Count,
    Forall,
    Id,
    Ite,
    Not,
    PartialStructure,
    Term,
    Var,
    free_variables,
    has_binder,
    num,
    subterms,
    substitute,
)


class GroundingError(Exception):
    pass


class NonGroundable(GroundingError):
    def __init__(self, term: Term, reason: str):
        super().__init__(f"cannot ground {term}: {reason}")
        self.term = term
        self.reason = reason


class CountNotFinite(GroundingError):
    pass


class InfiniteV(GroundingError):
    pass


class GroundingKind(enum.Enum):
    G = "G"
    TU = "TU"
    UF = "UF"

    @property
    def dual(self) -> "GroundingKind":
        return {GroundingKind.TU: GroundingKind.UF, GroundingKind.UF: GroundingKind.TU}[self]


G, TU, UF = GroundingKind.G, GroundingKind.TU, GroundingKind.UF


@dataclass(frozen=True)
class GroundingRelation:
    term: Term
    kind: GroundingKind
    valuation_attrs: tuple[str, ...]
    grounding_attr: str
    relation: Relation

    def groundings(self) -> dict[tuple, Term]:
        """Valuation tuple to grounding term."""
        return {row[:-1]: row[-1] for row in self.relation.rows}


@dataclass(frozen=True)
class XGenerator:
    term: Term
    polarity: GroundingKind
    relation: Relation
    fallback: bool = False  # True when the rule could not be evaluated


@dataclass(frozen=True)
class Residual:
    """A sentence grounding that still contains quantifiers over infinite
    sorts."""

    term: Term


_FALLBACK_ERRORS = (
    R.SymbolicSelection,
    R.SymbolicAggregation,
    R.InfiniteLeft,
    R.InfiniteRelation,
    InfiniteV,
    InfiniteTU,
    CountNotFinite,
    NonGroundable,
)


def _polarity(kind: GroundingKind, g: str) -> R.CompareExpr:
    bad = FALSE if kind is TU else TRUE
    return NotC(Eq(Attr(g), Const(bad)))


@dataclass
class GrounderConfig:
    trace: bool = False


class Grounder:
    """Grounds terms in a fixed partial structure.  Results are memoized per
    (term, kind, V), so one instance should serve one script."""

    def __init__(self, structure: PartialStructure, config: GrounderConfig = None):
        self.structure = structure
        self.config = config or GrounderConfig()
        self.stats: Counter = Counter()
        self.trace: list[tuple[str, Relation]] = []
        self._n = 0
        self._memo: dict = {}
        self._xmemo: dict = {}
        self._views: dict = {}
        self._ptu: dict = {}

    # ------------------------------------------------------------ public

    def ground(self, term: Term, kind: GroundingKind, V: Relation) -> GroundingRelation:
        rel = self._g(term, kind, V, False)
        return GroundingRelation(term, kind, V.attrs, rel.attrs[-1], rel)

    def xgen(self, term: Term, polarity: GroundingKind) -> XGenerator:
        key = (term, polarity)
        hit = self._xmemo.get(key)
        if hit is not None:
            return hit
        fv = free_variables(term)
        X = R.all_valuations(fv, self.structure)
        names = [v.name for v in fv]
        try:
            rel = R.project(self._xrule(term, polarity, X), names)
            out = XGenerator(term, polarity, rel)
        except _FALLBACK_ERRORS:
            self.stats["xgen fallback"] += 1
            out = XGenerator(term, polarity, X, fallback=True)
        self._xmemo[key] = out
        self._record(f"xgen-{polarity.value} {term}", out.relation)
        return out

    def ground_sentence(self, sentence: Term) -> Union[Term, Residual]:
        rel = self._g(sentence, UF, R.unit(), False)
        if not rel.rows:
            return TRUE
        (row,) = rel.rows
        term = row[-1]
        return Residual(term) if has_binder(term) else term

    # ----------------------------------------------------------- helpers

    def _attr(self) -> str:
        self._n += 1
        return f"#g{self._n}"

    def _record(self, label: str, rel: Relation) -> None:
        if self.config.trace:
            self.trace.append((label, rel))

    def _view(self, sym) -> ConstructiveView:
        v = self._views.get(sym)
        if v is None:
            v = ConstructiveView(sym, self.structure.interpretation(sym))
            self._views[sym] = v
        return v

    def _ptu_rel(self, sym) -> Relation:
        if sym not in self._ptu:
            try:
                self._ptu[sym] = predicate_tu_relation(sym, self.structure).relation
            except InfiniteTU:
                self._ptu[sym] = None
        return self._ptu[sym]

    def _extend(self, rel: Relation, V: Relation, expr) -> Relation:
        return R.project_extend(rel, V.attrs, self._attr(), expr)

    def _operand(self, cur: Relation, t: Term, V: Relation, approx: bool) -> tuple[Relation, str]:
        """Add a column holding the G grounding of ``t`` to ``cur``."""
        if isinstance(t, Var):
            return cur, t.name
        if isinstance(t, Id):
            a = self._attr()
            return R.project_extend(cur, cur.attrs, a, Lit(t)), a
        g = self._g(t, G, V, approx)
        return R.natural_join(cur, g, approx), g.attrs[-1]

    # --------------------------------------------------------- grounding

    def _g(self, t: Term, kind: GroundingKind, V: Relation, approx: bool) -> Relation:
        key = (t, kind, id(V), approx)
        hit = self._memo.get(key)
        if hit is not None:
            rel = hit[0]
            return R.rename(rel, rel.attrs[-1], self._attr())
        rel = self._dispatch(t, kind, V, approx)
        self.stats["rows"] += len(rel)
        self._memo[key] = (rel, V)
        self._record(f"{kind.value} {t}", rel)
        return rel

    def _dispatch(self, t: Term, kind: GroundingKind, V: Relation, approx: bool) -> Relation:
        if kind is G and t.sort == BOOL and not isinstance(t, (Id, Var)):
            return self._bool_g(t, V, approx)
        if kind is not G and t.sort != BOOL:
            raise GroundingError(f"{kind.value} grounding of non-boolean {t}")
        if isinstance(t, Id):
            return self._id(t, kind, V)
        if isinstance(t, Var):
            return self._var(t, kind, V)
        if isinstance(t, App):
            if kind is G:
                return self._app(t, V, approx)
            return self._pred(t, kind, V, approx)
        if isinstance(t, Not):
            self.stats["1.5"] += 1
            inner = self._g(t.arg, kind.dual, V, approx)
            return self._extend(inner, V, Build("not", (Col(inner.attrs[-1]),)))
        if isinstance(t, And):
            return self._and(t, kind, V, approx)
        if isinstance(t, Compare):
            return self._compare(t, kind, V, approx)
        if isinstance(t, Forall):
            return self._forall(t, kind, V)
        if isinstance(t, Count):
            return self._count(t, V, approx)
        if isinstance(t, Ite):
            return self._ite(t, kind, V, approx)
        raise NonGroundable(t, f"unsupported node {type(t).__name__}")

    def _bool_g(self, t: Term, V: Relation, approx: bool) -> Relation:
        """G of a boolean term: its TU relation padded with ⊥ on the
        valuations it does not cover."""
        if not V.is_finite():
            raise InfiniteV(f"G grounding of boolean {t} needs a finite V")
        tu = self._g(t, TU, V, approx)
        n = len(V.attrs)
        covered = {row[:n] for row in tu.rows}
        rows = set(tu.rows)
        rows.update(r + (FALSE,) for r in V.rows if r not in covered)
        return Relation(V.attrs + (self._attr(),), rows)

    def _id(self, t: Id, kind: GroundingKind, V: Relation) -> Relation:
        if kind is G:
            self.stats["2.1"] += 1
            return self._extend(V, V, Lit(t))
        self.stats["1.1" if t == TRUE else "1.2"] += 1
        keep = (t == TRUE) == (kind is TU)
        if not keep:
            return R.empty(V.attrs + (self._attr(),))
        return self._extend(V, V, Lit(t))

    def _var(self, t: Var, kind: GroundingKind, V: Relation) -> Relation:
        rel = self._extend(V, V, Col(t.name))
        if kind is G:
            self.stats["2.2"] += 1
            return rel
        self.stats["1.3"] += 1
        want = TRUE if kind is TU else FALSE
        return R.select(rel, Eq(Attr(rel.attrs[-1]), Const(want)))

    def _keys(self, t: App, V: Relation, approx: bool) -> tuple[Relation, list[str]]:
        cur, keys = V, []
        for a in t.args:
            cur, k = self._operand(cur, a, V, approx)
            keys.append(k)
        return cur, keys

    def _app(self, t: App, V: Relation, approx: bool) -> Relation:
        self.stats["2.3"] += 1
        cur, keys = self._keys(t, V, approx)
        view = self._view(t.sym)
        joined = R.theta_cross(cur, view, R.equi(zip(keys, view.key_attrs)), approx)
        return self._extend(joined, V, Col(view.value_attr))

    def _pred(self, t: App, kind: GroundingKind, V: Relation, approx: bool) -> Relation:
        self.stats["1.4"] += 1
        cur, keys = self._keys(t, V, approx)
        # p^TU is keyed by ids; a compound argument (left nested because the
        # symbol is uninterpreted) goes through the view
        simple = all(isinstance(a, (Id, Var)) for a in t.args)
        ptu = self._ptu_rel(t.sym) if simple else None
        if ptu is None:
            # no finite TU relation: look up the full interpretation instead
            view = self._view(t.sym)
            joined = R.theta_cross(cur, view, R.equi(zip(keys, view.key_attrs)), approx)
            rel = self._extend(joined, V, Col(view.value_attr))
            return R.select(rel, _polarity(kind, rel.attrs[-1]), approx)
        theta = R.equi(zip(keys, ptu.attrs[:-1]))
        if kind is TU:
            joined = R.theta_cross(cur, ptu, theta, approx)
            return self._extend(joined, V, Col("#v"))
        joined = R.left_outer_join(cur, ptu, theta)
        rel = self._extend(joined, V, IfNull("#v", FALSE))
        return R.select(rel, _polarity(UF, rel.attrs[-1]))

    def _and(self, t: And, kind: GroundingKind, V: Relation, approx: bool) -> Relation:
        self.stats["1.6"] += 1
        parts = [self._g(a, kind, V, approx) for a in t.args]
        if kind is TU:
            cur = parts[0]
            for p in parts[1:]:
                cur = R.natural_join(cur, p, approx)
            expr = Build("and", tuple(Col(p.attrs[-1]) for p in parts))
            rel = self._extend(cur, V, expr)
            return R.select(rel, _polarity(TU, rel.attrs[-1]), approx)
        acc = R.empty(V.attrs + ("#R",))
        for p in parts:
            acc = R.union(acc, R.rename(p, p.attrs[-1], "#R"))
        rel = R.project_aggregate(acc, V.attrs, self._attr(), "and", Col("#R"))
        return R.select(rel, _polarity(UF, rel.attrs[-1]))

    def _compare(self, t: Compare, kind: GroundingKind, V: Relation, approx: bool) -> Relation:
        self.stats["1.7"] += 1
        cur, a0 = self._operand(V, t.left, V, approx)
        cur, a1 = self._operand(cur, t.right, V, approx)
        holds = R.cmp(t.op, Attr(a0), Attr(a1))
        rho = OrC((NotC(IsId(Attr(a0))), NotC(IsId(Attr(a1))),
                   holds if kind is TU else NotC(holds)))
        if kind is G:
            rho = R.TRUE_C
        sel = R.select(cur, rho, approx)
        rel = self._extend(sel, V, Build(t.op, (Col(a0), Col(a1))))
        if kind is G:
            return rel
        return R.select(rel, _polarity(kind, rel.attrs[-1]), approx)

    def _ite(self, t: Ite, kind: GroundingKind, V: Relation, approx: bool) -> Relation:
        if kind is not G:
            rel = self._g(t, G, V, approx)
            return R.select(rel, _polarity(kind, rel.attrs[-1]), approx)
        cur, c = self._operand(V, t.cond, V, approx)
        cur, a = self._operand(cur, t.then, V, approx)
        cur, b = self._operand(cur, t.other, V, approx)
        return self._extend(cur, V, Build("ite", (Col(c), Col(a), Col(b))))

    def _forall(self, t: Forall, kind: GroundingKind, V: Relation) -> Relation:
        self.stats["1.8"] += 1
        if not V.is_finite():
            raise InfiniteV(f"quantifier grounding needs a finite V: {t}")
        X = self.xgen(t.body, UF).relation
        W = R.natural_join(V, X, approximate=True)
        n = len(V.attrs)
        open_keys = set()
        if not W.is_finite():
            open_keys = {row[:n] for row in W.rows if not R._row_closed(row)}
            W = Relation(W.attrs, {row for row in W.rows if row[:n] not in open_keys})
        self._record(f"W {t}", W)
        body = self._g(t.body, UF, W, False)
        g = self._attr()
        if kind is TU:
            extras = len(W.attrs) - n
            pad = {r + (NULL,) * extras + (TRUE,) for r in V.rows if r not in open_keys}
            body = R.union(Relation(body.attrs, pad), body)
        rel = R.project_aggregate(body, V.attrs, g, "and", Col(body.attrs[-1]))
        if open_keys:
            self.stats["residual"] += len(open_keys)
            rows = set(rel.rows)
            for key in open_keys:
                rows.add(key + (self._residual(t, dict(zip(V.attrs, key))),))
            rel = Relation(rel.attrs, rows)
        return R.select(rel, _polarity(kind, g))

    def _residual(self, t: Forall, valuation: dict) -> Term:
        term = simplify(mk_forall(t.vars, substitute(t.body, valuation)))
        if any(isinstance(s, Count) for s in subterms(term)):
            raise CountNotFinite(f"count under a quantifier that cannot be expanded: {t}")
        return term

    def _count(self, t: Count, V: Relation, approx: bool) -> Relation:
        self.stats["2.4"] += 1
        X = self.xgen(t.body, TU).relation
        Y = R.all_valuations(t.vars, self.structure)
        W = R.natural_join(R.natural_join(V, X, approximate=True), Y, approximate=True)
        if not W.is_finite():
            raise CountNotFinite(f"count ranges over infinitely many valuations: {t}")
        self._record(f"W {t}", W)
        body = self._g(t.body, TU, W, approx)
        n = len(V.attrs)
        extras = len(W.attrs) - n
        pad = {r + (NULL,) * extras + (FALSE,) for r in V.rows}
        acc = R.union(Relation(body.attrs, pad), body)
        expr = Build("ite", (Col(body.attrs[-1]), Lit(num(1)), Lit(num(0))))
        return R.project_aggregate(acc, V.attrs, self._attr(), "+", expr)

    # ------------------------------------------------------ x-generators

    def _xrule(self, t: Term, pol: GroundingKind, X: Relation) -> Relation:
        if isinstance(t, Id):
            self.stats["3.1" if t == TRUE else "3.2"] += 1
            return R.unit() if (t == TRUE) == (pol is TU) else R.empty(())
        if isinstance(t, Var):
            self.stats["3.3"] += 1
            return R.singleton(t.name, TRUE if pol is TU else FALSE)
        if isinstance(t, App):
            self.stats["3.4"] += 1
            if pol is UF:
                return X
            return self._g(t, TU, X, True)
        if isinstance(t, Not):
            self.stats["3.5"] += 1
            return self.xgen(t.arg, pol.dual).relation
        if isinstance(t, And):
            self.stats["3.6"] += 1
            parts = [self.xgen(a, pol).relation for a in t.args]
            if pol is TU:
                cur = parts[0]
                for p in parts[1:]:
                    cur = R.natural_join(cur, p, approximate=True)
                return cur
            acc = R.empty(X.attrs)
            for p in parts:
                acc = R.union(acc, R.project(R.natural_join(X, p, approximate=True), X.attrs))
            return acc
        if isinstance(t, Compare):
            if t.left.sort == BOOL and t.op == "=" and pol is UF:
                self.stats["3.8"] += 1
                acc = R.empty(X.attrs)
                for side in (t.left, t.right):
                    p = self.xgen(side, TU).relation
                    acc = R.union(acc, R.project(R.natural_join(X, p, approximate=True), X.attrs))
                return acc
            self.stats["3.7" if t.left.sort != BOOL else "3.8"] += 1
            return self._g(t, pol, X, True)
        if isinstance(t, Forall):
            self.stats["3.9"] += 1
            return self.xgen(t.body, pol).relation
        return X


def ground_terms(structure: PartialStructure, sentences, config: GrounderConfig = None):
    """Ground a list of sentences with one shared grounder."""
    gr = Grounder(structure, config)
    return [gr.ground_sentence(s) for s in sentences], gr
