"""Shared test support: random formula trees and a truth-table oracle."""
from __future__ import annotations

import itertools
import random
from pathlib import Path

from paraground.bdd import Manager, Ref

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

OPS = ("and", "or", "iff", "implies", "xor")


def random_tree(rng: random.Random, names: list[str], depth: int):
    """A formula as nested tuples: ("var", n), ("const", b), ("not", t), (op, l, r)."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.1:
            return ("const", rng.random() < 0.5)
        return ("var", rng.choice(names))
    if rng.random() < 0.2:
        return ("not", random_tree(rng, names, depth - 1))
    return (rng.choice(OPS), random_tree(rng, names, depth - 1), random_tree(rng, names, depth - 1))


def evaluate(tree, env: dict[str, bool]) -> bool:
    tag = tree[0]
    if tag == "var":
        return env[tree[1]]
    if tag == "const":
        return tree[1]
    if tag == "not":
        return not evaluate(tree[1], env)
    a, b = evaluate(tree[1], env), evaluate(tree[2], env)
    return {"and": a and b, "or": a or b, "iff": a == b, "implies": (not a) or b, "xor": a != b}[tag]


def build(tree, mgr: Manager) -> Ref:
    tag = tree[0]
    if tag == "var":
        return mgr.var(tree[1])
    if tag == "const":
        return mgr.true if tree[1] else mgr.false
    if tag == "not":
        return ~build(tree[1], mgr)
    return mgr.apply(tag, build(tree[1], mgr), build(tree[2], mgr))


def assignments(names: list[str]):
    for bits in itertools.product((False, True), repeat=len(names)):
        yield dict(zip(names, bits))


def table(fn, names: list[str]) -> tuple[bool, ...]:
    """Truth table of a Python predicate over ``names``."""
    return tuple(bool(fn(env)) for env in assignments(names))


def bdd_table(f: Ref, names: list[str]) -> tuple[bool, ...]:
    return table(lambda env: f.mgr.evaluate(f, env), names)


def corpus_files() -> list[Path]:
    return sorted(CORPUS.glob("*.pl"))


# criterion number -> PASS/FAIL line, filled by test_acceptance and printed by conftest
ACCEPTANCE: dict[int, str] = {}
