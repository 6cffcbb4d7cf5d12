"""Relations built from the input structure: sort relations, function
interpretation relations and the compact true-or-unknown relation of a
predicate."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .relalg import ConstructiveView, Relation, RelationError, all_valuations
from .terms import FALSE, FunSym, PartialStructure, Sort, TermError, Var, App


class UnknownSort(RelationError):
    pass


class InfiniteTU(RelationError):
    """The true-or-unknown points of a predicate are not a finite set."""


@dataclass(frozen=True)
class SortRelation:
    sort: Sort
    relation: Relation


@dataclass(frozen=True)
class FunctionRelation:
    symbol: FunSym
    relation: object  # Relation for constants, ConstructiveView otherwise


@dataclass(frozen=True)
class PredicateTURelation:
    symbol: FunSym
    relation: Relation


def sort_relation(sort: Sort, structure: PartialStructure) -> SortRelation:
    try:
        structure.universe(sort)
    except TermError as e:
        raise UnknownSort(str(e)) from None
    return SortRelation(sort, all_valuations([Var(sort.name, sort)], structure))


def function_relation(symbol: FunSym, structure: PartialStructure) -> FunctionRelation:
    view = ConstructiveView(symbol, structure.interpretation(symbol))
    if symbol.arity == 0:
        return FunctionRelation(symbol, Relation((view.value_attr,), {(view.value(()),)}))
    return FunctionRelation(symbol, view)


def predicate_tu_relation(symbol: FunSym, structure: PartialStructure) -> PredicateTURelation:
    """Rows of the interpretation relation whose value is not ``⊥``.  Open
    points keep the constructed atom as their value."""
    interp = structure.interpretation(symbol)
    attrs = tuple(f"#a{i + 1}" for i in range(symbol.arity)) + ("#v",)
    if interp is not None and interp.default == FALSE:
        rows = {k + (v,) for k, v in interp.mapping.items() if v != FALSE}
        rows |= {k + (App(symbol, k),) for k in interp.unknown}
        return PredicateTURelation(symbol, Relation(attrs, rows))
    universes = [structure.universe(s) for s in symbol.arg_sorts]
    if any(u is None for u in universes):
        raise InfiniteTU(f"{symbol.name} may be true at infinitely many points")
    view = ConstructiveView(symbol, interp)
    rows = set()
    for keys in itertools.product(*universes):
        v = view.value(keys)
        if v != FALSE:
            rows.add(keys + (v,))
    return PredicateTURelation(symbol, Relation(attrs, rows))
