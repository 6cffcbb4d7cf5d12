"""Canonical SMT-LIB text for terms: fully parenthesized, n-ary ``and``,
integers in decimal and reals as exact decimals or ``(/ p q)``."""
from __future__ import annotations

import re
from fractions import Fraction

from .terms import (
    And,
    App,
    Compare,
    Count,
    Forall,
    Id,
    Ite,
    Not,
    REAL,
    Sort,
    Term,
    Var,
)

_SIMPLE = re.compile(r"^[A-Za-z~!@$%^&*_\-+=<>.?/][A-Za-z0-9~!@$%^&*_\-+=<>.?/]*$")


def symbol(name: str) -> str:
    if _SIMPLE.match(name):
        return name
    return f"|{name}|"


def sort_to_smtlib(sort: Sort) -> str:
    return symbol(sort.name)


def _decimal(q: Fraction) -> str | None:
    d = q.denominator
    k = 0
    while d % 2 == 0:
        d //= 2
        k += 1
    j = 0
    while d % 5 == 0:
        d //= 5
        j += 1
    if d != 1:
        return None
    digits = max(k, j, 1)
    scaled = q.numerator * 10**digits // q.denominator
    s = str(scaled).rjust(digits + 1, "0")
    whole, frac = s[:-digits], s[-digits:]
    frac = frac.rstrip("0") or "0"
    return f"{whole}.{frac}"


def id_to_smtlib(t: Id) -> str:
    v = t.value
    if isinstance(v, str):
        return symbol(v)
    if t.sort == REAL:
        q = Fraction(v)
        mag = abs(q)
        text = _decimal(mag)
        if text is None:
            text = f"(/ {mag.numerator}.0 {mag.denominator}.0)"
        return f"(- {text})" if q < 0 else text
    return f"(- {-v})" if v < 0 else str(v)


def term_to_smtlib(t: Term) -> str:
    out: list[str] = []
    _emit(t, out)
    return "".join(out)


def _binders(vars) -> str:
    return "(" + " ".join(f"({symbol(v.name)} {sort_to_smtlib(v.sort)})" for v in vars) + ")"


def _emit(t: Term, out: list[str]) -> None:
    if isinstance(t, Id):
        out.append(id_to_smtlib(t))
    elif isinstance(t, Var):
        out.append(symbol(t.name))
    elif isinstance(t, App):
        if not t.args:
            out.append(symbol(t.sym.name))
            return
        out.append("(" + symbol(t.sym.name))
        for a in t.args:
            out.append(" ")
            _emit(a, out)
        out.append(")")
    elif isinstance(t, Not):
        out.append("(not ")
        _emit(t.arg, out)
        out.append(")")
    elif isinstance(t, And):
        if not t.args:
            out.append("true")
            return
        out.append("(and")
        for a in t.args:
            out.append(" ")
            _emit(a, out)
        out.append(")")
    elif isinstance(t, Compare):
        out.append(f"({t.op} ")
        _emit(t.left, out)
        out.append(" ")
        _emit(t.right, out)
        out.append(")")
    elif isinstance(t, Ite):
        out.append("(ite ")
        _emit(t.cond, out)
        out.append(" ")
        _emit(t.then, out)
        out.append(" ")
        _emit(t.other, out)
        out.append(")")
    elif isinstance(t, Forall):
        out.append(f"(forall {_binders(t.vars)} ")
        _emit(t.body, out)
        out.append(")")
    elif isinstance(t, Count):
        out.append(f"(x-count {_binders(t.vars)} ")
        _emit(t.body, out)
        out.append(")")
    else:
        raise TypeError(f"cannot print {type(t).__name__}")
