"""S-expression reader with source locations."""
from __future__ import annotations

import re
from dataclasses import dataclass


@dataclass(frozen=True)
class Loc:
    line: int
    col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


class ParseError(Exception):
    def __init__(self, msg: str, loc: Loc = None):
        super().__init__(f"{loc}: {msg}" if loc else msg)
        self.loc = loc


@dataclass(frozen=True)
class Atom:
    """``kind`` is one of symbol, numeral, decimal, string, keyword."""

    text: str
    kind: str
    loc: Loc

    def __repr__(self):
        return self.text


@dataclass(frozen=True)
class SList:
    items: tuple
    loc: Loc

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def __iter__(self):
        return iter(self.items)

    def __repr__(self):
        return "(" + " ".join(map(repr, self.items)) + ")"


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>;[^\n]*)
  | (?P<open>\()
  | (?P<close>\))
  | (?P<string>"(?:[^"]|"")*")
  | (?P<quoted>\|[^|\\]*\|)
  | (?P<decimal>[0-9]+\.[0-9]+)
  | (?P<numeral>0|[1-9][0-9]*)
  | (?P<keyword>:[A-Za-z0-9~!@$%^&*_\-+=<>.?/]+)
  | (?P<symbol>[A-Za-z~!@$%^&*_\-+=<>.?/#][A-Za-z0-9~!@$%^&*_\-+=<>.?/#]*)
    """,
    re.VERBOSE,
)


def read_all(text: str) -> list:
    """All top-level expressions of ``text``."""
    stack: list[tuple[Loc, list]] = []
    out: list = []
    line, line_start = 1, 0
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        loc = Loc(line, pos - line_start + 1)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", loc)
        kind = m.lastgroup
        tok = m.group()
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = m.start() + tok.rfind("\n") + 1
        pos = m.end()
        if kind in ("ws", "comment"):
            continue
        if kind == "open":
            stack.append((loc, []))
            continue
        if kind == "close":
            if not stack:
                raise ParseError("unbalanced ')'", loc)
            start, items = stack.pop()
            node = SList(tuple(items), start)
        elif kind == "quoted":
            node = Atom(tok[1:-1], "symbol", loc)
        elif kind == "string":
            node = Atom(tok[1:-1].replace('""', '"'), "string", loc)
        else:
            node = Atom(tok, kind, loc)
        if stack:
            stack[-1][1].append(node)
        else:
            out.append(node)
    if stack:
        raise ParseError("unbalanced '('", stack[-1][0])
    return out
