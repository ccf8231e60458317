import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paraground.bdd import Manager
from paraground.formula import parse_formula
from paraground.frontend import parse_program
from paraground.oracle import (
    FAIL,
    OracleError,
    alpha_pos,
    apply,
    canonical,
    compose,
    concrete_run,
    goal_groundness,
    ground_v,
    mgu,
    project,
    rename_sub,
)
from paraground.terms import Int, Struct, Var, atom, make_list, term_vars
from paraground.transform import Pred

a, b = atom("a"), atom("b")
X, Y, Z, W = Var("x"), Var("y"), Var("z"), Var("w")


def f(*args):
    return Struct("f", args)


def test_mgu_examples():
    assert mgu([(X, f(Y))]) == {"x": f(Y)}
    assert mgu([(X, f(X))]) is FAIL
    assert mgu([(f(X, a), f(b, Y))]) == {"x": b, "y": a}
    assert mgu([(a, b)]) is FAIL
    assert mgu([(f(X), Struct("f", (X, Y)))]) is FAIL


def test_compose_project_rename():
    assert compose({"x": a}, ["x"], {"y": X}, ["y", "x"]) == {"x": a, "y": a}
    assert project({"x": a, "y": b}, ["x"]) == {"y": b}
    assert rename_sub({"x": f(Z)}, ["x"], ["y"]) == {"y": f(Z)}
    with pytest.raises(OracleError):
        rename_sub({"x": a}, ["x", "y"], ["z", "z"])


def test_compose_renames_auxiliary_variables_apart():
    # z is auxiliary in both; the two occurrences must not be identified
    out = compose({"x": f(Z)}, ["x"], {"y": f(Z)}, ["y"])
    assert out is not FAIL
    zx = list(term_vars(out["x"]))
    zy = list(term_vars(out["y"]))
    assert zx != zy


def test_compose_failure():
    assert compose({"x": a}, ["x"], {"x": b}, ["x"]) is FAIL


def test_canonical_form():
    c = canonical({"x": f(Y)}, ["x", "y"])
    assert c["y"] == Var(c["y"].name) and c["y"].name not in ("x", "y")
    assert c["x"] == f(c["y"])


def test_ground_v():
    assert ground_v({"x": a, "y": f(Z)}, ["x", "y"]) == {"x": 1, "y": 0}


# -- mgu against an independent reference ------------------------------------------


def _reference_mgu(eqs):
    """Martelli-Montanari on explicit equation lists."""
    eqs = list(eqs)
    sol = {}
    while eqs:
        s, t = eqs.pop()
        s, t = apply(s, sol), apply(t, sol)
        if s == t:
            continue
        if isinstance(t, Var) and not isinstance(s, Var):
            s, t = t, s
        if isinstance(s, Var):
            if any(v == s for v in term_vars(t)):
                return None
            sol = {k: apply(v, {s.name: t}) for k, v in sol.items()}
            sol[s.name] = t
            continue
        if isinstance(s, Struct) and isinstance(t, Struct) and s.functor == t.functor and s.arity == t.arity:
            eqs.extend(zip(s.args, t.args))
            continue
        return None
    return sol


def _terms():
    leaves = st.one_of(st.sampled_from([X, Y, Z, W]), st.sampled_from([a, b]), st.integers(0, 2).map(Int))
    return st.recursive(
        leaves,
        lambda ch: st.builds(lambda fn, xs: Struct(fn, tuple(xs)), st.sampled_from(["f", "g"]), st.lists(ch, min_size=1, max_size=2)),
        max_leaves=6,
    )


@settings(max_examples=300, deadline=None)
@given(_terms(), _terms())
def test_mgu_matches_reference(s, t):
    got = mgu([(s, t)])
    ref = _reference_mgu([(s, t)])
    assert (got is FAIL) == (ref is None)
    if got is FAIL:
        return
    # unifier, idempotent, and as general as the reference (each an instance of the other)
    assert apply(s, got) == apply(t, got)
    assert {k: apply(v, got) for k, v in got.items()} == got
    assert mgu([(apply(Var(v), got), apply(Var(v), ref)) for v in set(got) | set(ref)]) is not FAIL
    assert len(got) == len({k for k, v in ref.items()})


@settings(max_examples=200, deadline=None)
@given(st.dictionaries(st.sampled_from(["x", "y"]), st.sampled_from([a, b, f(a), f(b)]), min_size=1),
       st.dictionaries(st.sampled_from(["y", "w"]), st.sampled_from([a, b, f(a)]), min_size=1))
def test_compose_agrees_with_sequential_application_on_ground(t1, t2):
    u, v = sorted(t1), sorted(t2)
    out = compose(t1, u, t2, v)
    clash = any(t1[k] != t2[k] for k in set(t1) & set(t2))
    if clash:
        assert out is FAIL
    else:
        assert out == t1 | t2


# -- bounded execution --------------------------------------------------------------------


@pytest.fixture
def rev(load):
    return load("rev.pl")


def test_reverse_ground_goal(rev):
    goal = Struct("r", (make_list([a, b]), Var("Y")))
    run = concrete_run(rev, [goal], depth=10)
    answers = run.substitutions(Pred("ans", "r", 2))
    assert {"x1": make_list([a, b]), "x2": make_list([b, a])} in answers
    assert not run.exhausted and run.events == []


def test_reverse_open_goal(rev):
    run = concrete_run(rev, [Struct("r", (Var("X"), Var("Y")))], depth=3)
    calls = run.substitutions(Pred("call", "a", 3))
    assert calls and any(list(term_vars(s["x2"])) for s in calls)
    assert run.substitutions(Pred("ans", "r", 2))


def test_goal_without_matching_clause(rev):
    run = concrete_run(rev, [Struct("r", (a, Var("Y")))], depth=5)
    assert run.substitutions(Pred("ans", "r", 2)) == []
    assert len(run.substitutions(Pred("call", "r", 2))) == 1


def test_instantiation_error_is_recorded():
    prog = parse_program(":- main(p/1). p(X) :- X > 1.")
    run = concrete_run(prog, [Struct("p", (Var("X"),))], depth=4)
    assert any("instantiation error" in e for e in run.events)
    assert run.substitutions(Pred("ans", "p", 1)) == []


def test_arithmetic_runs(load):
    run = concrete_run(load("len.pl"), [Struct("len", (make_list([a, b, a]), Var("N")))], depth=10)
    assert {"x1": make_list([a, b, a]), "x2": Int(3)} in run.substitutions(Pred("ans", "len", 2))


def test_depth_must_be_positive(rev):
    with pytest.raises(OracleError):
        concrete_run(rev, [], depth=0)


def test_step_budget(load):
    run = concrete_run(load("perm.pl"), [Struct("perm", (Var("X"), Var("Y")))], depth=30, max_steps=200)
    assert run.exhausted


# -- abstraction ---------------------------------------------------------------------------


@pytest.fixture
def m():
    return Manager(["x", "w", "x1", "x2"])


def test_alpha_examples(m):
    assert alpha_pos([{"x": a}], ["x"], m) == m.var("x")
    assert alpha_pos([{"x": f(Z)}], ["x"], m).is_true
    assert alpha_pos([{"x": f(Y), "w": Y}], ["x", "w"], m) == parse_formula("x <-> w", m)
    assert alpha_pos([], ["x"], m).is_false


def test_alpha_handles_domain_variables_in_range(m):
    assert alpha_pos([{"w": X}], ["x", "w"], m) == parse_formula("x <-> w", m)


def test_alpha_is_a_join(m):
    t1, t2 = {"x": a, "w": Y}, {"x": Y, "w": b}
    assert alpha_pos([t1, t2], ["x", "w"], m) == alpha_pos([t1], ["x", "w"], m) | alpha_pos([t2], ["x", "w"], m)


def test_alpha_models_are_groundness_of_instances(m):
    rng = random.Random(2)
    pool = [a, f(Y), f(Y, Z), Y, Z, f(a, b)]
    for _ in range(50):
        theta = {"x1": rng.choice(pool), "x2": rng.choice(pool)}
        h = alpha_pos([theta], ["x1", "x2"], m)
        # every grounding of theta's variables is a model when mapped through ground_v
        for vy, vz in ((a, a), (Var("v1"), a), (a, Var("v2")), (Var("v1"), Var("v2"))):
            inst = {k: apply(v, {"y": vy, "z": vz}) for k, v in theta.items()}
            env = {k: bool(g) for k, g in ground_v(inst, ["x1", "x2"]).items()}
            assert m.evaluate(h, env)


def test_goal_groundness():
    g = goal_groundness(Struct("r", (make_list([a]), Var("Y"))), ["b1", "b2"])
    assert g.members == {"b1"}
