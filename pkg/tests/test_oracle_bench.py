import itertools

import pytest

from helpers import EXAMPLES
from rground.bench import (
    CSV_HEADER,
    common_item,
    generate_instance,
    graph_coloring,
    n_queens,
    pigeonhole,
    random_graph,
    run_bench,
)
from rground.frontend import parse
from rground.grounder import Residual
from rground.oracle import (
    FiniteInstance,
    OracleError,
    SearchSpaceTooLarge,
    brute_force_satisfiable,
    instance_from_script,
)
from rground.pipeline import ground_text
from rground.terms import FALSE, TRUE, PartialStructure

PATH = [(1, 2), (2, 3)]


def _sat(text):
    return brute_force_satisfiable(instance_from_script(parse(text)))[0]


def _grounded_sat(text):
    res = ground_text(text)
    terms = tuple(g.term if isinstance(g, Residual) else g for g in res.groundings)
    return brute_force_satisfiable(FiniteInstance(res.script.structure, terms))[0]


def _proper_colorings(k):
    return sum(1 for c in itertools.product(range(k), repeat=3) if c[0] != c[1] and c[1] != c[2])


def test_path_colorings():
    assert _proper_colorings(3) == 12 and _proper_colorings(1) == 0
    assert _sat(graph_coloring(PATH, 3, finite_nodes=True))
    assert not _sat(graph_coloring(PATH, 1, finite_nodes=True))


def test_empty_sentence_list_is_sat():
    ok, witness = brute_force_satisfiable(FiniteInstance(PartialStructure(), ()))
    assert ok and witness is not None


def test_search_space_cap():
    text = graph_coloring([(i, i + 1) for i in range(1, 15)], 3, finite_nodes=True)
    with pytest.raises(SearchSpaceTooLarge):
        brute_force_satisfiable(instance_from_script(parse(text)))


def test_open_infinite_result_rejected():
    s = parse("(declare-fun f (Int) Int)(assert (= (f 1) 2))")
    with pytest.raises(OracleError):
        brute_force_satisfiable(instance_from_script(s))


def test_graph_coloring_is_the_intro_script():
    assert parse(graph_coloring(PATH, 3)).commands == parse((EXAMPLES / "intro_x_set.smt2").read_text()).commands


def test_n_queens_one_is_sat():
    assert _sat(n_queens(1))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_pigeonhole_unsat(n):
    assert not _sat(pigeonhole(n))


@pytest.mark.parametrize("text", [
    n_queens(2), n_queens(3), n_queens(4),
    pigeonhole(1), pigeonhole(2), pigeonhole(3),
    graph_coloring(PATH, 2, finite_nodes=True),
    graph_coloring([(1, 2), (2, 3), (3, 1)], 2, finite_nodes=True),
    graph_coloring(random_graph(5, 8, 3), 3, finite_nodes=True),
    common_item(3, 5, seed=1, finite_items=True),
    common_item(3, 5, seed=1, common=False, finite_items=True),
])
def test_oracle_agrees_with_grounded_output(text):
    assert _sat(text) == _grounded_sat(text)


def test_n_queens_known_values():
    assert [_sat(n_queens(n)) for n in (1, 2, 3, 4)] == [True, False, False, True]


def _shared_item(text, people):
    """Intersect the like lists straight from the x-set text."""
    atoms = text.split("(x-set ", 1)[1].split("))", 1)[0]
    likes = [a.strip("() ").split() for a in atoms.split(")") if a.strip()]
    people = {f"u{p}" for p in range(1, people + 1)}
    by_item = {}
    for p, i in likes:
        by_item.setdefault(i, set()).add(p)
    return any(ps == people for ps in by_item.values())


@pytest.mark.parametrize("seed", range(5))
def test_common_item_planted_and_removed(seed):
    for common in (True, False):
        text = common_item(4, seed=seed, common=common)
        assert _shared_item(text, 4) == common
        assert ground_text(text).groundings == [TRUE if common else FALSE]


def test_generate_instance_is_deterministic():
    for fam in ("graph-coloring", "n-queens", "pigeonhole", "common-item"):
        assert generate_instance(fam, 4, seed=2) == generate_instance(fam, 4, seed=2)
    with pytest.raises(ValueError):
        generate_instance("sudoku", 3)


def test_bench_row_without_solver():
    row = run_bench("pigeonhole", 3)
    assert row.verdict == "grounded" and row.solve_ms is None
    assert row.csv().split(",")[:2] == ["pigeonhole", "3"]
    assert len(CSV_HEADER.split(",")) == len(row.csv().split(","))
