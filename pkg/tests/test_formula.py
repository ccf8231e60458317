import random

import pytest

from paraground.bdd import Manager
from paraground.formula import FormulaSyntaxError, cnf_clauses, format_formula, parse_formula

from helpers import bdd_table, build, evaluate, random_tree, table


@pytest.fixture
def m():
    return Manager(["x1", "x2", "x3", "b1", "b2"])


def test_precedence(m):
    x1, x2, x3 = (m.var(f"x{i}") for i in (1, 2, 3))
    assert parse_formula("x1 | x2 & x3", m) == x1 | (x2 & x3)
    assert parse_formula("x1 -> x2 -> x3", m) == x1.implies(x2.implies(x3))
    assert parse_formula("x1 <-> x2 -> x3", m) == x1.iff(x2.implies(x3))
    assert parse_formula("~x1 & x2", m) == ~x1 & x2
    assert parse_formula(" ( 1 ) & 0 ", m).is_false


@pytest.mark.parametrize("text", ["", "x1 &", "(x1", "x1 x2", "x1 # x2", "->"])
def test_syntax_errors(m, text):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(text, m)


def test_reverse_answer_pretty(m):
    f = parse_formula("(x1 <-> x2) & ((b1 | b2) -> x1 & x2)", m)
    text = format_formula(f)
    assert parse_formula(text, m) == f
    assert "b1 -> x1" in text


def test_constants_and_single_clause(m):
    assert format_formula(m.true) == "1"
    assert format_formula(m.false) == "0"
    assert format_formula(parse_formula("b1 -> x1", m)) == "b1 -> x1"
    assert format_formula(parse_formula("x1 & x2", m)) == "x1 & x2"


def test_cnf_literals(m):
    f = parse_formula("x1 <-> x2", m)
    assert cnf_clauses(f) == [["~x1", "x2"], ["x1", "~x2"]]


def test_pretty_print_round_trip_random():
    names = ["x1", "x2", "x3", "b1"]
    mgr = Manager(names)
    rng = random.Random(1)
    for _ in range(300):
        tree = random_tree(rng, names, 4)
        f = build(tree, mgr)
        g = parse_formula(format_formula(f), mgr)
        assert g == f
        assert bdd_table(g, names) == table(lambda env: evaluate(tree, env), names)
