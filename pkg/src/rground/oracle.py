"""Brute-force model expansion over finite universes, and random instances.

The oracle enumerates every total expansion of a partial structure on the
points the sentences can observe, and evaluates the sentences with the
reference evaluator.  It never calls the grounder.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .terms import (
    BOOL,
    FALSE,
    INT,
    TRUE,
    And,
    App,
    Compare,
    Count,
    Forall,
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
    evaluate,
    mk_exists,
    mk_implies,
    mk_or,
    num,
    subterms,
    symbols_of,
)


class OracleError(Exception):
    pass


class SearchSpaceTooLarge(OracleError):
    pass


@dataclass(frozen=True)
class FiniteInstance:
    structure: PartialStructure
    sentences: tuple = ()


def open_points(sym: FunSym, structure: PartialStructure, sentences: Sequence[Term]) -> list[tuple]:
    """Points of ``sym`` the structure leaves open.  Over an infinite domain
    only the points written literally in the sentences are considered."""
    interp = structure.interpretation(sym)
    universes = [structure.universe(s) for s in sym.arg_sorts]
    if all(u is not None for u in universes):
        candidates = itertools.product(*universes)
    else:
        seen = {}
        for t in sentences:
            for s in subterms(t):
                if isinstance(s, App) and s.sym == sym and all(isinstance(a, Id) for a in s.args):
                    seen.setdefault(s.args)
        candidates = list(seen)
    if interp is None:
        return list(candidates)
    return [k for k in candidates if interp.lookup(k) is None]


def expansions(instance: FiniteInstance, limit: int = 10**6) -> Iterator[PartialStructure]:
    """Every total expansion of the structure on the observable points."""
    A = instance.structure
    slots = []
    for sym in sorted(set().union(*(symbols_of(t) for t in instance.sentences)) if instance.sentences
                      else (), key=lambda s: s.name):
        pts = open_points(sym, A, instance.sentences)
        if not pts:
            continue
        values = A.universe(sym.result)
        if values is None:
            raise OracleError(f"{sym.name} has open points with values in {sym.result}")
        slots.extend((sym, p, values) for p in pts)
    size = 1
    for _, _, values in slots:
        size *= len(values)
        if size > limit:
            raise SearchSpaceTooLarge(f"more than {limit} expansions")
    for choice in itertools.product(*(values for _, _, values in slots)):
        interps = dict(A.interps)
        added: dict = {}
        for (sym, p, _), v in zip(slots, choice):
            added.setdefault(sym, {})[p] = v
        for sym, pts in added.items():
            base = interps.get(sym) or Interpretation()
            mapping = dict(base.mapping)
            mapping.update(pts)
            interps[sym] = Interpretation(mapping, base.default)
        yield PartialStructure(A.universes, interps)


def brute_force_satisfiable(instance: FiniteInstance, limit: int = 10**6):
    """``(True, witness)`` for the first expansion satisfying every sentence,
    else ``(False, None)``."""
    for full in expansions(instance, limit):
        if all(evaluate(s, full) == TRUE for s in instance.sentences):
            return True, full
    return False, None


# ------------------------------------------------------- random instances


@dataclass
class RandomConfig:
    max_depth: int = 3
    max_ids: int = 3
    max_binder_vars: int = 2
    count_weight: float = 0.12
    max_open_points: int = 7


@dataclass
class RandomSignature:
    structure: PartialStructure
    sorts: list[Sort]
    predicates: list[FunSym]
    functions: list[FunSym]  # non-boolean, including constants
    ids: dict = field(default_factory=dict)  # Sort -> ids


def _random_interp(rng: random.Random, sym: FunSym, A_univ: dict, budget: list) -> Optional[Interpretation]:
    universes = [A_univ[s] for s in sym.arg_sorts]
    points = list(itertools.product(*universes))
    values = A_univ[sym.result]
    mode = rng.choice(["none", "total", "partial", "partial"])
    if mode == "none" and len(points) <= budget[0]:
        budget[0] -= len(points)
        return None
    mapping = {p: rng.choice(values) for p in points}
    if mode == "total" or budget[0] <= 0:
        if sym.result == BOOL and rng.random() < 0.5:
            return Interpretation({p: v for p, v in mapping.items() if v == TRUE}, FALSE)
        return Interpretation(mapping)
    k = min(budget[0], rng.randint(1, max(1, len(points) // 2)))
    opened = set(rng.sample(points, k))
    budget[0] -= len(opened)
    if sym.result == BOOL and rng.random() < 0.5:
        # closed-world predicate with a few unknown tuples
        return Interpretation({p: v for p, v in mapping.items() if v == TRUE and p not in opened},
                              FALSE, frozenset(opened))
    return Interpretation({p: v for p, v in mapping.items() if p not in opened})


def random_signature(rng: random.Random, cfg: RandomConfig = None) -> RandomSignature:
    cfg = cfg or RandomConfig()
    D = Sort("D")
    univ = {D: tuple(Id(f"d{i}", D) for i in range(rng.randint(2, cfg.max_ids)))}
    univ[BOOL] = (TRUE, FALSE)
    candidates = [
        FunSym("p", (D,), BOOL),
        FunSym("q", (D, D), BOOL),
        FunSym("f", (D,), D),
        FunSym("c", (), D),
    ]
    rng.shuffle(candidates)
    chosen = candidates[: rng.randint(2, 3)]
    if not any(s.is_predicate for s in chosen):
        chosen.append(FunSym("p", (D,), BOOL))
    budget = [cfg.max_open_points]
    interps = {}
    for s in chosen:
        it = _random_interp(rng, s, univ, budget)
        if it is not None:
            interps[s] = it
    A = PartialStructure({D: univ[D]}, interps)
    return RandomSignature(A, [D], [s for s in chosen if s.is_predicate],
                           [s for s in chosen if not s.is_predicate], {D: univ[D]})


class _Gen:
    def __init__(self, rng: random.Random, sig: RandomSignature, cfg: RandomConfig):
        self.rng, self.sig, self.cfg = rng, sig, cfg
        self.n = 0

    def fresh(self, sort: Sort) -> Var:
        self.n += 1
        return Var(f"v{self.n}", sort)

    def dterm(self, depth: int, env: list[Var]) -> Term:
        D = self.sig.sorts[0]
        r = self.rng.random()
        dvars = [v for v in env if v.sort == D]
        if dvars and r < 0.5:
            return self.rng.choice(dvars)
        funs = [f for f in self.sig.functions]
        if funs and depth > 0 and r < 0.8:
            f = self.rng.choice(funs)
            return App(f, tuple(self.dterm(depth - 1, env) for _ in f.arg_sorts))
        return self.rng.choice(self.sig.ids[D])

    def formula(self, depth: int, env: list[Var]) -> Term:
        rng = self.rng
        if depth <= 0 or rng.random() < 0.25:
            return self.atom(max(depth, 1), env)
        r = rng.random()
        if r < 0.15:
            return Not(self.formula(depth - 1, env))
        if r < 0.35:
            return And(tuple(self.formula(depth - 1, env) for _ in range(rng.randint(2, 3))))
        if r < 0.45:
            return mk_or([self.formula(depth - 1, env) for _ in range(2)])
        if r < 0.52:
            return mk_implies(self.formula(depth - 1, env), self.formula(depth - 1, env))
        if r < 0.57:
            a, b = self.formula(depth - 1, env), self.formula(depth - 1, env)
            return Compare("=", a, b)
        if r < 0.60:
            return Ite(self.formula(depth - 1, env), self.formula(depth - 1, env),
                       self.formula(depth - 1, env))
        if r < 0.60 + self.cfg.count_weight:
            return self.count_atom(depth, env)
        vs = self.binder_vars()
        body = self.formula(depth - 1, env + vs)
        return Forall(tuple(vs), body) if rng.random() < 0.5 else mk_exists(vs, body)

    def binder_vars(self) -> list[Var]:
        D = self.sig.sorts[0]
        k = self.rng.randint(1, self.cfg.max_binder_vars)
        return [self.fresh(BOOL if self.rng.random() < 0.15 else D) for _ in range(k)]

    def count_atom(self, depth: int, env: list[Var]) -> Term:
        vs = self.binder_vars()
        body = self.formula(depth - 1, env + vs)
        cnt = Count(tuple(vs), body)
        op = self.rng.choice(["=", "<", "<=", ">=", ">"])
        if self.rng.random() < 0.2:
            other = App(arith_symbol("+", [INT, INT]), (cnt, num(self.rng.randint(-1, 1))))
            return Compare(op, other, num(self.rng.randint(0, 4)))
        return Compare(op, cnt, num(self.rng.randint(0, 4)))

    def atom(self, depth: int, env: list[Var]) -> Term:
        rng = self.rng
        r = rng.random()
        bvars = [v for v in env if v.sort == BOOL]
        if r < 0.05:
            return rng.choice([TRUE, FALSE])
        if bvars and r < 0.15:
            return rng.choice(bvars)
        if r < 0.65:
            p = rng.choice(self.sig.predicates)
            return App(p, tuple(self.dterm(depth - 1, env) for _ in p.arg_sorts))
        return Compare("=", self.dterm(depth - 1, env), self.dterm(depth - 1, env))


def random_formula(rng: random.Random, sig: RandomSignature, depth: int = 3,
                   env: Sequence[Var] = (), cfg: RandomConfig = None) -> Term:
    return _Gen(rng, sig, cfg or RandomConfig()).formula(depth, list(env))


def random_open_formula(rng: random.Random, sig: RandomSignature, depth: int = 3,
                        cfg: RandomConfig = None) -> tuple[Term, list[Var]]:
    """A formula over up to two free variables of sort D (and maybe one Bool)."""
    D = sig.sorts[0]
    env = [Var("x", D), Var("y", D)][: rng.randint(0, 2)]
    if rng.random() < 0.2:
        env.append(Var("b", BOOL))
    return random_formula(rng, sig, depth, env, cfg), env


def random_instance(rng: random.Random, cfg: RandomConfig = None) -> FiniteInstance:
    cfg = cfg or RandomConfig()
    sig = random_signature(rng, cfg)
    sentences = tuple(random_formula(rng, sig, cfg.max_depth, (), cfg)
                      for _ in range(rng.randint(1, 2)))
    return FiniteInstance(sig.structure, sentences)


def instance_from_script(script) -> FiniteInstance:
    """The model-expansion problem of a parsed script, macros inlined."""
    from .frontend import inline_macros
    from .terms import Fresh

    fresh = Fresh()
    sentences = tuple(inline_macros(a, script.macros, fresh) for a in script.assertions)
    return FiniteInstance(script.structure, sentences)
