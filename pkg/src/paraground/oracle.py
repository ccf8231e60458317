"""Ground truth for testing the analyser.

Concrete substitutions with unification, composition, projection and
renaming; a bounded SLD interpreter that collects the calls and answers
of every predicate; the Pos abstraction of a set of substitutions; and an
exhaustive enumerator of monotone maps ``Con -> Pos`` for small parameter
and variable sets.  None of this is fast, and none of it needs to be.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .bdd import Manager, Ref
from .domain import ConElement, con_elements
from .frontend import SourceProgram
from .terms import Int, Struct, Term, Var, term_vars
from .transform import Pred

Substitution = dict  # variable name -> Term

FAIL = None


class OracleError(Exception):
    pass


# -- substitutions ---------------------------------------------------------------


def walk(t: Term, s: Mapping[str, Term]) -> Term:
    while isinstance(t, Var) and t.name in s:
        t = s[t.name]
    return t


def apply(t: Term, s: Mapping[str, Term]) -> Term:
    """Fully apply a (possibly triangular) substitution."""
    t = walk(t, s)
    if isinstance(t, Struct) and t.args:
        return Struct(t.functor, tuple(apply(a, s) for a in t.args))
    return t


def _occurs(name: str, t: Term, s: Mapping[str, Term]) -> bool:
    t = walk(t, s)
    if isinstance(t, Var):
        return t.name == name
    if isinstance(t, Struct):
        return any(_occurs(name, a, s) for a in t.args)
    return False


def unify(a: Term, b: Term, s: dict[str, Term]) -> dict[str, Term] | None:
    """Extend triangular substitution ``s`` (copied) so that ``a`` = ``b``; occurs check on."""
    s = dict(s)
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x, y = walk(x, s), walk(y, s)
        if x == y:
            continue
        if isinstance(x, Var):
            if _occurs(x.name, y, s):
                return FAIL
            s[x.name] = y
        elif isinstance(y, Var):
            if _occurs(y.name, x, s):
                return FAIL
            s[y.name] = x
        elif isinstance(x, Struct) and isinstance(y, Struct):
            if x.functor != y.functor or x.arity != y.arity:
                return FAIL
            stack.extend(zip(x.args, y.args))
        else:
            return FAIL
    return s


def mgu(eqs: Iterable[tuple[Term, Term]]) -> Substitution | None:
    """Idempotent most general unifier of a set of equations, or ``FAIL``."""
    s: dict[str, Term] | None = {}
    for a, b in eqs:
        s = unify(a, b, s)
        if s is FAIL:
            return FAIL
    return {v: apply(Var(v), s) for v in s}


def vars_of(theta: Mapping[str, Term], domain: Iterable[str] | None = None) -> set[str]:
    names = set(theta) if domain is None else set(domain)
    out = set(names)
    for v in names:
        out.update(x.name for x in term_vars(theta.get(v, Var(v))))
    return out


def _fresh_names(avoid: set[str], prefix: str = "_Z") -> Iterator[str]:
    for i in itertools.count(1):
        name = f"{prefix}{i}"
        if name not in avoid:
            yield name


def canonical(theta: Mapping[str, Term], domain: Iterable[str]) -> Substitution:
    """Canonical representative over ``domain``: total on it, range disjoint from it."""
    domain = list(domain)
    dset = set(domain)
    image = {v: apply(Var(v), theta) for v in domain}
    clash = sorted({x.name for t in image.values() for x in term_vars(t)} & dset)
    if not clash:
        return image
    fresh = _fresh_names(vars_of(theta) | dset)
    ren = {v: Var(next(fresh)) for v in clash}
    return {v: apply(t, ren) for v, t in image.items()}


def compose(theta1: Mapping[str, Term], u: Iterable[str], theta2: Mapping[str, Term], v: Iterable[str]):
    """Unification of ``[theta1]_U`` with ``[theta2]_V`` over ``U | V``."""
    u, v = list(u), list(v)
    c1 = canonical(theta1, u)
    c2 = canonical(theta2, v)
    aux1 = vars_of(c1) - set(u)
    aux2 = vars_of(c2) - set(v)
    avoid = vars_of(c1) | vars_of(c2) | set(u) | set(v)
    fresh = _fresh_names(avoid, "_W")
    ren = {name: Var(next(fresh)) for name in sorted(aux2 & (aux1 | set(u)))}
    c2 = {x: apply(t, ren) for x, t in c2.items()}
    s = mgu([(Var(x), t) for x, t in c1.items()] + [(Var(x), t) for x, t in c2.items()])
    if s is FAIL:
        return FAIL
    out = {}
    for x in dict.fromkeys(u + v):
        out[x] = apply(Var(x), s)
    return out


def project(theta: Mapping[str, Term], hidden: Iterable[str]) -> Substitution:
    hidden = set(hidden)
    return {v: t for v, t in theta.items() if v not in hidden}


def rename_sub(theta: Mapping[str, Term], xs: list[str], ys: list[str]) -> Substitution:
    if len(xs) != len(ys) or len(set(ys)) != len(ys):
        raise OracleError("renaming needs two sequences of distinct variables of equal length")
    mapping = dict(zip(xs, ys))
    return {mapping.get(v, v): t for v, t in theta.items()}


def ground_v(theta: Mapping[str, Term], domain: Iterable[str]) -> dict[str, int]:
    return {v: int(not any(True for _ in term_vars(apply(Var(v), theta)))) for v in domain}


# -- bounded concrete execution -------------------------------------------------------


class _Budget(Exception):
    pass


@dataclass
class ConcreteRun:
    """Calls and answers collected per predicate, as argument tuples."""

    points: dict[Pred, set[tuple[Term, ...]]] = field(default_factory=dict)
    events: list[str] = field(default_factory=list)
    exhausted: bool = False

    def substitutions(self, pred: Pred) -> list[Substitution]:
        """Tuples read as substitutions over ``x1..xn``."""
        return [{f"x{i}": t for i, t in enumerate(args, 1)} for args in sorted(self.points.get(pred, ()), key=str)]

    def add(self, pred: Pred, args: tuple[Term, ...]) -> None:
        self.points.setdefault(pred, set()).add(_standardize(args))


def _standardize(args: tuple[Term, ...]) -> tuple[Term, ...]:
    names: dict[str, Var] = {}
    for t in args:
        for v in term_vars(t):
            if v.name not in names:
                names[v.name] = Var(f"_V{len(names) + 1}")
    return tuple(apply(t, names) for t in args)


class _Instantiation(Exception):
    pass


def _eval_arith(t: Term, s) -> int:
    t = walk(t, s)
    if isinstance(t, Int):
        return t.value
    if isinstance(t, Var):
        raise _Instantiation()
    if isinstance(t, Struct):
        if t.arity == 2:
            a, b = (_eval_arith(x, s) for x in t.args)
            if t.functor == "+":
                return a + b
            if t.functor == "-":
                return a - b
            if t.functor == "*":
                return a * b
            if t.functor in ("//", "/"):
                if b == 0:
                    raise ArithmeticError("division by zero")
                return a // b
            if t.functor == "mod":
                if b == 0:
                    raise ArithmeticError("division by zero")
                return a % b
        if t.arity == 1 and t.functor == "-":
            return -_eval_arith(t.args[0], s)
    raise ArithmeticError(f"not an arithmetic expression: {t}")


_COMPARE = {
    "=<": lambda a, b: a <= b,
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "=:=": lambda a, b: a == b,
    "=\\=": lambda a, b: a != b,
}


def _builtin(goal: Struct, s):
    """Solutions of a builtin goal, as a list of substitutions."""
    name, arity = goal.indicator
    if (name, arity) == ("true", 0):
        return [s]
    if arity == 2:
        a, b = goal.args
        if name == "=":
            out = unify(a, b, s)
            return [] if out is FAIL else [out]
        if name == "\\=":
            return [s] if unify(a, b, s) is FAIL else []
        if name == "==":
            return [s] if apply(a, s) == apply(b, s) else []
        if name == "\\==":
            return [s] if apply(a, s) != apply(b, s) else []
        if name == "is":
            out = unify(a, Int(_eval_arith(b, s)), s)
            return [] if out is FAIL else [out]
        if name in _COMPARE:
            return [s] if _COMPARE[name](_eval_arith(a, s), _eval_arith(b, s)) else []
    raise OracleError(f"no concrete semantics for builtin {name}/{arity}")


def concrete_run(
    program: SourceProgram,
    goals: Iterable[Struct],
    depth: int = 12,
    builtins: Iterable[tuple[str, int]] | None = None,
    max_steps: int = 200_000,
) -> ConcreteRun:
    """Bounded SLD resolution collecting calls and answers for every predicate.

    A call at derivation depth ``depth`` is recorded but not resolved, so
    the collected sets are subsets of the true ones.
    """
    if depth < 1:
        raise OracleError("depth bound must be at least 1")
    from .builtins import BuiltinTable

    builtin_set = set(builtins) if builtins is not None else set(BuiltinTable.default())
    defs = program.predicates()
    run = ConcreteRun()
    counter = itertools.count(1)
    steps = 0

    def rename(clause):
        k = next(counter)
        mapping = {v.name: Var(f"{v.name}#{k}") for t in (clause.head, *clause.body) for v in term_vars(t)}
        return apply(clause.head, mapping), [apply(g, mapping) for g in clause.body]

    def solve_goal(goal: Term, s, d: int):
        nonlocal steps
        goal = walk(goal, s)
        if not isinstance(goal, Struct):
            run.events.append(f"instantiation error: goal {goal}")
            return
        if goal.indicator in builtin_set:
            try:
                yield from _builtin(goal, s)
            except _Instantiation:
                run.events.append(f"instantiation error in {apply(goal, s)}")
            except ArithmeticError as exc:
                run.events.append(f"evaluation error in {apply(goal, s)}: {exc}")
            return
        name, arity = goal.indicator
        args = tuple(apply(a, s) for a in goal.args)
        run.add(Pred("call", name, arity), args)
        if d >= depth:
            return
        for clause in defs.get((name, arity), ()):
            steps += 1
            if steps > max_steps:
                raise _Budget()
            head, body = rename(clause)
            s1 = unify(head, goal, s)
            if s1 is FAIL:
                continue
            for s2 in solve_body(body, s1, d + 1):
                run.add(Pred("ans", name, arity), tuple(apply(a, s2) for a in goal.args))
                yield s2

    def solve_body(body, s, d):
        if not body:
            yield s
            return
        for s1 in solve_goal(body[0], s, d):
            yield from solve_body(body[1:], s1, d)

    try:
        for g in goals:
            for _ in solve_goal(g, {}, 0):
                pass
    except _Budget:
        run.exhausted = True
    return run


# -- abstraction ------------------------------------------------------------------------


def alpha_pos(thetas: Iterable[Mapping[str, Term]], domain: list[str], mgr: Manager) -> Ref:
    """Pos abstraction: OR over theta of EXISTS(-V). AND_x (x <-> AND vars(theta(x)))."""
    acc = mgr.false
    for theta in thetas:
        names: dict[str, str] = {}
        conj = mgr.true
        # canonical form keeps the range clear of the variables of interest
        for x, t in canonical(theta, domain).items():
            vs = []
            for v in term_vars(t):
                if v.name not in names:
                    names[v.name] = f"_t{len(names) + 1}"
                vs.append(mgr.var(names[v.name]))
            conj = conj & mgr.var(x).iff(mgr.conj(vs))
        acc = acc | mgr.exists(names.values(), conj)
    return acc


# -- enumeration of monotone maps ------------------------------------------------------


def pos_functions(domain: list[str], mgr: Manager) -> list[Ref]:
    """Every positive Boolean function over ``domain`` (true on the all-ones row)."""
    rows = list(itertools.product((0, 1), repeat=len(domain)))
    top = tuple(1 for _ in domain)
    others = [r for r in rows if r != top]
    out = []
    for bits in itertools.product((0, 1), repeat=len(others)):
        models = [top] + [r for r, b in zip(others, bits) if b]
        f = mgr.false
        for row in models:
            f = f | mgr.conj(mgr.var(v) if val else ~mgr.var(v) for v, val in zip(domain, row))
        out.append(f)
    return out


def enumerate_monotone(params: list[str], domain: list[str], mgr: Manager) -> list[dict[ConElement, Ref]]:
    """All monotone maps from Con over ``params`` to Pos over ``domain``."""
    if len(params) > 3 or len(domain) > 2:
        raise OracleError("enumeration limited to at most 3 parameters and 2 variables")
    values = pos_functions(domain, mgr)
    elements = con_elements(params)  # subsets in increasing size
    out: list[dict[ConElement, Ref]] = []
    chosen: dict[ConElement, Ref] = {}

    def extend(k: int) -> None:
        if k == len(elements):
            out.append(dict(chosen))
            return
        g = elements[k]
        below = [h for h in elements[:k] if h.members < g.members]
        for f in values:
            if all(mgr.entails(f, chosen[h]) for h in below):
                chosen[g] = f
                extend(k + 1)
                del chosen[g]

    extend(0)
    return out


def goal_groundness(goal: Struct, params: list[str]) -> ConElement:
    """Con element describing which goal arguments are ground."""
    return ConElement(frozenset(b for b, t in zip(params, goal.args) if not any(True for _ in term_vars(t))))
