"""Desk-scale benchmark instances and a one-row CSV harness."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from .pipeline import ground_text
from .solver import run_solver

FAMILIES = ("graph-coloring", "n-queens", "pigeonhole", "common-item")
CSV_HEADER = "family,size,ground_ms,solve_ms,verdict"
_COLOR_NAMES = ("red", "green", "blue")


def _datatype(name: str, ctors: Sequence[str]) -> str:
    return f"(declare-datatype {name} (" + " ".join(f"({c})" for c in ctors) + "))"


def _color_names(k: int) -> list[str]:
    return list(_COLOR_NAMES) if k == 3 else [f"c{i}" for i in range(k)]


def random_graph(nodes: int, edges: int, seed: int = 0) -> list[tuple[int, int]]:
    """``edges`` distinct directed edges between distinct nodes 1..nodes."""
    if nodes < 2 or edges > nodes * (nodes - 1):
        raise ValueError("too many edges for the node count")
    rng = random.Random(seed)
    out: set = set()
    while len(out) < edges:
        a, b = rng.randint(1, nodes), rng.randint(1, nodes)
        if a != b:
            out.add((a, b))
    return sorted(out)


def graph_coloring(edges: Sequence[tuple[int, int]], colors: int = 3,
                   finite_nodes: bool = False) -> str:
    """Color nodes so that no edge joins two nodes of one color.  Nodes are
    Int unless ``finite_nodes``, which declares them as a datatype."""
    lines = [_datatype("Color", _color_names(colors))]
    node = "Int"
    if finite_nodes:
        nodes = sorted({n for e in edges for n in e}) or [1]
        lines.append(_datatype("Node", [f"n{n}" for n in nodes]))
        node = "Node"
        show = lambda n: f"n{n}"  # noqa: E731
    else:
        show = str
    lines += [
        f"(declare-fun colorOf ({node}) Color)",
        f"(declare-fun edge ({node} {node}) Bool)",
        "(x-interpret-pred edge (x-set " + " ".join(f"({show(a)} {show(b)})" for a, b in edges) + "))",
        f"(assert (forall ((x {node}) (y {node}))",
        "            (=> (edge x y)",
        "                (not (= (colorOf x) (colorOf y))))))",
        "(check-sat)",
        "(get-model)",
    ]
    return "\n".join(lines) + "\n"


def n_queens(n: int) -> str:
    """One queen per row; ``queen r`` is its column."""
    if n < 1:
        raise ValueError("n-queens needs n >= 1")
    rows = [f"r{i}" for i in range(1, n + 1)]
    cols = [f"c{i}" for i in range(1, n + 1)]
    num = lambda names: " ".join(f"(({a}) {i})" for i, a in enumerate(names, 1))  # noqa: E731
    lines = [
        _datatype("Row", rows),
        _datatype("Col", cols),
        "(declare-fun queen (Row) Col)",
        "(declare-fun rowNum (Row) Int)",
        "(declare-fun colNum (Col) Int)",
        f"(x-interpret-fun rowNum (x-mapping {num(rows)}))",
        f"(x-interpret-fun colNum (x-mapping {num(cols)}))",
        "(assert (forall ((a Row) (b Row))",
        "  (=> (not (= a b))",
        "      (and (not (= (queen a) (queen b)))",
        "           (not (= (abs (- (rowNum a) (rowNum b)))",
        "                   (abs (- (colNum (queen a)) (colNum (queen b))))))))))",
        "(check-sat)",
    ]
    return "\n".join(lines) + "\n"


def pigeonhole(holes: int) -> str:
    """``holes + 1`` pigeons, each in its own hole: unsatisfiable."""
    if holes < 1:
        raise ValueError("pigeonhole needs at least one hole")
    lines = [
        _datatype("Pigeon", [f"p{i}" for i in range(1, holes + 2)]),
        _datatype("Hole", [f"h{i}" for i in range(1, holes + 1)]),
        "(declare-fun hole (Pigeon) Hole)",
        "(assert (forall ((a Pigeon) (b Pigeon))",
        "  (=> (not (= a b)) (not (= (hole a) (hole b))))))",
        "(check-sat)",
    ]
    return "\n".join(lines) + "\n"


def common_item(people: int, items: int = None, seed: int = 0, common: bool = True,
                finite_items: bool = False) -> str:
    """Is there an item every person likes?  Likes are random; with
    ``common`` one item is planted in every list.  Items are Int unless
    ``finite_items``."""
    if people < 1:
        raise ValueError("common-item needs at least one person")
    items = items or 2 * people
    rng = random.Random(seed)
    planted = rng.randint(1, items)
    likes = set()
    for p in range(1, people + 1):
        for i in range(1, items + 1):
            if rng.random() < 0.3:
                likes.add((p, i))
        if common:
            likes.add((p, planted))
        else:
            likes.discard((p, planted))
    if not common:
        # no item is liked by everyone: drop person 1's likes shared by all
        for i in range(1, items + 1):
            if all((p, i) in likes for p in range(1, people + 1)):
                likes.discard((1, i))
    item, show = "Int", str
    lines = [_datatype("Person", [f"u{p}" for p in range(1, people + 1)])]
    if finite_items:
        item, show = "Item", lambda i: f"i{i}"  # noqa: E731
        lines.append(_datatype("Item", [f"i{i}" for i in range(1, items + 1)]))
    lines += [
        f"(declare-fun likes (Person {item}) Bool)",
        "(x-interpret-pred likes (x-set "
        + " ".join(f"(u{p} {show(i)})" for p, i in sorted(likes)) + "))",
        f"(assert (exists ((i {item})) (forall ((p Person)) (likes p i))))",
        "(check-sat)",
    ]
    return "\n".join(lines) + "\n"


def generate_instance(family: str, size: int, seed: int = 0) -> str:
    """Default instance of ``family`` at ``size``.  For graph coloring the
    size is the node count, with twice as many edges and 3 colors."""
    if family == "graph-coloring":
        return graph_coloring(random_graph(size, min(2 * size, size * (size - 1)), seed))
    if family == "n-queens":
        return n_queens(size)
    if family == "pigeonhole":
        return pigeonhole(size)
    if family == "common-item":
        return common_item(size, seed=seed)
    raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")


@dataclass
class BenchRow:
    family: str
    size: int
    ground_ms: float
    solve_ms: Optional[float]
    verdict: str

    def csv(self) -> str:
        solve = "" if self.solve_ms is None else f"{self.solve_ms:.1f}"
        return f"{self.family},{self.size},{self.ground_ms:.1f},{solve},{self.verdict}"


def run_bench(family: str, size: int, solver: Optional[str] = None,
              timeout: float = 600.0, seed: int = 0) -> BenchRow:
    """Ground (and solve, given a solver command) one generated instance.
    The verdict is ``grounded`` without a solver, ``timeout`` or ``error``
    when the solver fails."""
    text = generate_instance(family, size, seed)
    t0 = time.perf_counter()
    res = ground_text(text)
    ground_ms = (time.perf_counter() - t0) * 1000
    if not solver:
        return BenchRow(family, size, ground_ms, None, "grounded")
    from .solver import SolverError, SolverTimeout

    try:
        out = run_solver(solver, res.text, timeout)
    except SolverTimeout:
        return BenchRow(family, size, ground_ms, timeout * 1000, "timeout")
    except SolverError:
        return BenchRow(family, size, ground_ms, None, "error")
    return BenchRow(family, size, ground_ms, out.seconds * 1000, out.verdict)
