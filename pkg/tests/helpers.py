"""Brute-force checkers shared by the unit and acceptance suites.

None of these call the grounder's own rules: meanings come from
``evaluate`` over every total expansion, sets from plain enumeration.
"""
from __future__ import annotations

import random
from pathlib import Path

from rground import relalg as R
from rground.frontend import prepare
from rground.grounder import TU, UF, G, Grounder
from rground.oracle import (
    FiniteInstance,
    RandomConfig,
    expansions,
    random_open_formula,
    random_signature,
)
from rground.terms import BOOL, FALSE, TRUE, Count, Forall, evaluate, free_variables, subterms

ROOT = Path(__file__).resolve().parents[1]
EXAMPLES = ROOT / "examples_smt"

INTRO_GROUNDED = "(assert (and (not (= (colorOf 1) (colorOf 2))) (not (= (colorOf 2) (colorOf 3)))))"


def total_expansions(structure, terms):
    return list(expansions(FiniteInstance(structure, tuple(terms))))


def random_case(seed: int, cfg: RandomConfig = None):
    """A random structure, a prepared open formula and a random V over its
    free variables."""
    rng = random.Random(seed)
    sig = random_signature(rng, cfg)
    raw, _ = random_open_formula(rng, sig, 3, cfg)
    term = prepare(raw, sig.structure)
    fv = free_variables(term)
    full = R.all_valuations(fv, sig.structure)
    rows = [r for r in sorted(full.rows, key=str) if rng.random() < 0.7]
    V = R.Relation(full.attrs, rows)
    return sig.structure, term, V


def subterm_cases(term):
    """Distinct subterms worth grounding on their own."""
    seen = []
    for s in subterms(term):
        if s not in seen:
            seen.append(s)
    return seen


def _valuations(V):
    return [dict(zip(V.attrs, r)) for r in V.rows]


def grounding_violations(gr: Grounder, structure, term, kind, V, exps) -> list[str]:
    """Conditions (1) to (4) of a grounding relation, checked exactly."""
    rel = gr.ground(term, kind, V).relation
    n = len(V.attrs)
    out = []
    keys = [r[:n] for r in rel.rows]
    vrows = set(V.rows)
    if kind is G:
        if set(keys) != vrows:
            out.append("projection differs from V")
    elif not set(keys) <= vrows:
        out.append("rows outside V")
    if len(keys) != len(set(keys)):
        out.append("no functional dependency")
    covered = set(keys)
    for r in rel.rows:
        val = dict(zip(V.attrs, r[:n]))
        g = r[-1]
        if kind is TU and g == FALSE:
            out.append(f"false row in TU: {r}")
        if kind is UF and g == TRUE:
            out.append(f"true row in UF: {r}")
        for A in exps:
            if evaluate(g, A) != evaluate(term, A, val):
                out.append(f"meaning differs at {val}: {g}")
                break
    if kind is not G:
        dropped = FALSE if kind is TU else TRUE
        for key in vrows - covered:
            val = dict(zip(V.attrs, key))
            if any(evaluate(term, A, val) != dropped for A in exps):
                out.append(f"dropped valuation {val} is not {dropped}")
    return out


def kinds_for(term):
    return (G, TU, UF) if term.sort == BOOL else (G,)


def semantic_xgen(structure, term, polarity, exps) -> set:
    """Valuations of the free variables for which ``term`` is true (TU) or
    false (UF) in at least one total expansion."""
    fv = free_variables(term)
    full = R.all_valuations(fv, structure)
    want = TRUE if polarity is TU else FALSE
    out = set()
    for r in full.rows:
        val = dict(zip(full.attrs, r))
        if any(evaluate(term, A, val) == want for A in exps):
            out.add(r)
    return out


def grounding_xgen(gr: Grounder, structure, term, polarity) -> set:
    """The valuations whose G grounding is not the excluded boolean id."""
    fv = free_variables(term)
    full = R.all_valuations(fv, structure)
    rel = gr.ground(term, G, full).relation
    bad = FALSE if polarity is TU else TRUE
    return {r[:-1] for r in rel.rows if r[-1] != bad}


def has_count_under_binder(term) -> bool:
    return any(isinstance(s, Forall) and any(isinstance(c, Count) for c in subterms(s.body))
               for s in subterms(term))
