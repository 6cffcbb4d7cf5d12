"""Serialization of a grounded script as plain SMT-LIB 2.6.

Layout: the ``set-*`` preamble, datatype declarations, declarations of the
symbols still referenced, assertions translating the known points of those
symbols, one assertion per grounding, then the trailer (``check-sat``,
``get-model``, ``echo``, ...).  No x-extension command survives.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence, Union

from .frontend import (
    CheckSat,
    DeclareDatatype,
    DeclareFun,
    Echo,
    GetModel,
    Passthrough,
    Script,
)
from .grounder import Residual
from .printer import term_to_smtlib
from .simplify import mk_compare, simplify
from .terms import (
    TRUE,
    And,
    App,
    Compare,
    Forall,
    FunSym,
    Not,
    PartialStructure,
    Term,
    Var,
    mk_implies,
    subterms,
)

_PREAMBLE = ("set-logic", "set-option", "set-info")


@dataclass
class EmittedScript:
    preamble: list[str] = field(default_factory=list)
    declarations: list[str] = field(default_factory=list)
    assertions: list[str] = field(default_factory=list)
    trailer: list[str] = field(default_factory=list)

    def to_text(self) -> str:
        lines = self.preamble + self.declarations + self.assertions + self.trailer
        return "".join(line + "\n" for line in lines)


def referenced_symbols(terms: Sequence[Term]) -> set[FunSym]:
    out = set()
    for t in terms:
        for s in subterms(t):
            if isinstance(s, App) and not s.sym.builtin:
                out.add(s.sym)
    return out


def interpretation_assertions(sym: FunSym, structure: PartialStructure) -> list[Term]:
    """Assertions stating what the structure knows about ``sym``."""
    interp = structure.interpretation(sym)
    if interp is None:
        return []
    out = [simplify(mk_compare("=", App(sym, k), v)) for k, v in interp.mapping.items()]
    if interp.default is None:
        return out
    universes = [structure.universe(s) for s in sym.arg_sorts]
    if all(u is not None for u in universes):
        for k in itertools.product(*universes):
            if k not in interp.mapping and k not in interp.unknown:
                out.append(simplify(mk_compare("=", App(sym, k), interp.default)))
        return out
    args = tuple(Var(f"a{i + 1}", s) for i, s in enumerate(sym.arg_sorts))
    exceptions = list(interp.mapping) + list(interp.unknown)
    body = mk_compare("=", App(sym, args), interp.default)
    if exceptions:
        body = mk_implies(And(tuple(_not_point(args, k) for k in exceptions)), body)
    out.append(Forall(args, simplify(body)))
    return out


def _not_point(args, point) -> Term:
    return Not(And(tuple(Compare("=", a, p) for a, p in zip(args, point))))


def emit_script(script: Script, groundings: Sequence[Union[Term, Residual]]) -> EmittedScript:
    out = EmittedScript()
    terms = [g.term if isinstance(g, Residual) else g for g in groundings]
    used = referenced_symbols(terms)
    structure = script.structure
    interp_asserts = []
    for c in script.commands:
        if isinstance(c, Passthrough) and c.head in _PREAMBLE:
            out.preamble.append(c.to_smtlib())
        elif isinstance(c, DeclareDatatype):
            out.declarations.append(c.to_smtlib())
        elif isinstance(c, DeclareFun) and c.symbol in used:
            out.declarations.append(c.to_smtlib())
            interp_asserts.extend(interpretation_assertions(c.symbol, structure))
        elif isinstance(c, (CheckSat, GetModel, Echo)) or (
                isinstance(c, Passthrough) and c.head not in _PREAMBLE):
            out.trailer.append(c.to_smtlib())
    for t in interp_asserts + terms:
        if t == TRUE:
            continue
        out.assertions.append(f"(assert {term_to_smtlib(t)})")
    return out


def emit(script: Script, groundings: Sequence[Union[Term, Residual]]) -> str:
    return emit_script(script, groundings).to_text()
