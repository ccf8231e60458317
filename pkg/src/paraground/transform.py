"""From source clauses to an abstract program over Pos constraints.

The pipeline is the classic one for goal-dependent bottom-up analysis:

1. :func:`magic_transform` rewrites every clause into ``call_p``/``ans_p``
   clauses whose success sets are the calls and answers of ``p`` during
   top-down execution of the goal.
2. :func:`build_call_graph` and :func:`scc_order` order the transformed
   clauses by dependency.  This happens before abstraction so that no
   spurious edges are introduced.
3. :func:`normalize` flattens every clause so that heads and calls take
   distinct variables and all term structure lives in ``v = f(w...)``
   equations.
4. :func:`abstract_compile` turns equations and builtins into groundness
   constraints and adds the seed clause for the goal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .bdd import Manager, Ref
from .builtins import BuiltinTable
from .formula import format_formula, parse_formula
from .frontend import SourceProgram
from .terms import Int, Struct, Term, Var


class TransformError(Exception):
    pass


@dataclass(frozen=True, order=True)
class Pred:
    kind: str  # "call" | "ans" | "builtin"
    name: str
    arity: int

    @property
    def label(self) -> str:
        return self.name if self.kind == "builtin" else f"{self.kind}_{self.name}"

    def __str__(self):
        return f"{self.label}/{self.arity}"


@dataclass(frozen=True)
class Atom:
    pred: Pred
    args: tuple[Term, ...]

    def __str__(self):
        from .terms import term_to_str

        if not self.args:
            return self.pred.label
        return f"{self.pred.label}({', '.join(term_to_str(a) for a in self.args)})"


@dataclass(frozen=True)
class MagicClause:
    head: Atom
    body: tuple[Atom, ...]
    origin: int  # index of the source clause

    def __str__(self):
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(map(str, self.body))}."


@dataclass
class MagicProgram:
    clauses: list[MagicClause]
    goal: Pred  # the call_ predicate seeded by the goal

    def defined(self) -> set[Pred]:
        return {c.head.pred for c in self.clauses} | {self.goal}


def magic_transform(
    program: SourceProgram,
    builtins: BuiltinTable | None = None,
    goal: tuple[str, int] | None = None,
) -> MagicProgram:
    """Rewrite ``program`` into call/answer clauses for ``goal``.

    For a clause ``p(t) :- q1(t1), ..., qm(tm)`` this yields, in order, one
    ``call_qi(ti) :- call_p(t), ans_q1(t1), ..., ans_q(i-1)(t(i-1))`` per
    user goal and finally ``ans_p(t) :- call_p(t), ans_q1(t1), ..., ans_qm(tm)``.
    Builtin goals stay in place and guard every later clause of the body.
    """
    builtins = builtins if builtins is not None else BuiltinTable.default()
    name, arity = goal or program.goal
    out: list[MagicClause] = []
    for index, clause in enumerate(program.clauses):
        hname, harity = clause.head.indicator
        guard = Atom(Pred("call", hname, harity), clause.head.args)
        prefix: list[Atom] = [guard]
        for g in clause.body:
            if not isinstance(g, Struct):
                raise TransformError(f"non-callable goal {g} (program not validated?)")
            if g.indicator in builtins:
                prefix.append(Atom(Pred("builtin", g.functor, g.arity), g.args))
                continue
            out.append(MagicClause(Atom(Pred("call", g.functor, g.arity), g.args), tuple(prefix), index))
            prefix.append(Atom(Pred("ans", g.functor, g.arity), g.args))
        out.append(MagicClause(Atom(Pred("ans", hname, harity), clause.head.args), tuple(prefix), index))
    return MagicProgram(out, Pred("call", name, arity))


# -- call graph and SCCs -------------------------------------------------------


@dataclass
class CallGraph:
    """Clause-level dependency graph; node 0 is the goal seed clause."""

    nodes: list[int]
    edges: dict[int, list[int]]

    def has_self_loop(self, node: int) -> bool:
        return node in self.edges.get(node, ())


def build_call_graph(program: MagicProgram) -> CallGraph:
    """Edge ``i -> j`` when clause ``i`` uses the predicate defined by clause ``j``.

    Clause ``i`` of the magic program becomes node ``i + 1``; node 0 is the
    seed clause ``call_goal(...)`` added later by abstract compilation.
    """
    defining: dict[Pred, list[int]] = {program.goal: [0]}
    for i, c in enumerate(program.clauses, 1):
        defining.setdefault(c.head.pred, []).append(i)
    nodes = list(range(len(program.clauses) + 1))
    edges: dict[int, list[int]] = {0: []}
    for i, c in enumerate(program.clauses, 1):
        targets: list[int] = []
        for a in c.body:
            if a.pred.kind == "builtin":
                continue
            for j in defining.get(a.pred, ()):
                if j not in targets:
                    targets.append(j)
        edges[i] = targets
    return CallGraph(nodes, edges)


def scc_order(graph: CallGraph) -> list[list[int]]:
    """Strongly connected components, dependencies before dependents.

    Iterative Tarjan.  A component is emitted only after every component it
    reaches, which for "depends on" edges is exactly evaluation order.
    """
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0

    for root in graph.nodes:
        if root in index:
            continue
        work = [(root, iter(graph.edges.get(root, ())))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(graph.edges.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
    return out


# -- normalisation -------------------------------------------------------------


@dataclass(frozen=True)
class Eq:
    """``x<lhs> = functor(x<args>...)``, or ``x<lhs> = x<args[0]>`` when functor is None."""

    lhs: int
    functor: Union[str, int, None]
    args: tuple[int, ...] = ()

    def __str__(self):
        if self.functor is None:
            return f"x{self.lhs} = x{self.args[0]}"
        if not self.args:
            return f"x{self.lhs} = {self.functor}"
        return f"x{self.lhs} = {self.functor}({', '.join(f'x{a}' for a in self.args)})"


@dataclass(frozen=True)
class Call:
    pred: Pred
    args: tuple[int, ...]

    def __str__(self):
        if not self.args:
            return self.pred.label
        return f"{self.pred.label}({', '.join(f'x{a}' for a in self.args)})"


@dataclass
class NormClause:
    head: Pred
    nvars: int
    body: list[Union[Eq, Call]]
    origin: int = -1
    bindings: dict[str, int] = field(default_factory=dict)  # source variable -> index

    def __str__(self):
        head = f"{self.head.label}({', '.join(f'x{i}' for i in range(1, self.head.arity + 1))})"
        if not self.body:
            return head + "."
        return f"{head} :- {', '.join(map(str, self.body))}."


class _Flattener:
    def __init__(self, arity: int):
        self.nvars = arity
        self.bindings: dict[str, int] = {}
        self.body: list[Union[Eq, Call]] = []
        # identical subterms denote identical values, so they share one variable
        self.shared: dict[Term, int] = {}

    def fresh(self) -> int:
        self.nvars += 1
        return self.nvars

    def var_index(self, v: Var) -> int:
        idx = self.bindings.get(v.name)
        if idx is None:
            idx = self.bindings[v.name] = self.fresh()
        return idx

    def define(self, target: int, t: Term) -> None:
        """Emit equations stating ``x<target> = t``."""
        if isinstance(t, Var):
            self.body.append(Eq(target, None, (self.var_index(t),)))
        elif t in self.shared:
            self.body.append(Eq(target, None, (self.shared[t],)))
        else:
            self.shared[t] = target
            if isinstance(t, Int):
                self.body.append(Eq(target, t.value))
            else:
                args = tuple(self.arg(a) for a in t.args)
                self.body.append(Eq(target, t.functor, args))

    def arg(self, t: Term) -> int:
        if isinstance(t, Var):
            return self.var_index(t)
        if t in self.shared:
            return self.shared[t]
        v = self.fresh()
        self.define(v, t)
        return v


def normalize_clause(c: MagicClause) -> NormClause:
    head = c.head
    fl = _Flattener(head.pred.arity)
    pending = []
    for j, t in enumerate(head.args, 1):
        if isinstance(t, Var) and t.name not in fl.bindings:
            fl.bindings[t.name] = j
        else:
            pending.append((j, t))
    for j, t in pending:
        fl.define(j, t)
    for a in c.body:
        if a.args == head.args:
            # the call_p guard repeats the head: reuse the head variables
            args = tuple(range(1, head.pred.arity + 1))
        else:
            args = tuple(fl.arg(t) for t in a.args)
        fl.body.append(Call(a.pred, args))
    return NormClause(head.pred, fl.nvars, fl.body, c.origin, fl.bindings)


def normalize(program: MagicProgram) -> list[NormClause]:
    return [normalize_clause(c) for c in program.clauses]


# -- abstract compilation --------------------------------------------------------


@dataclass
class ParamSpace:
    """Parameters ``b1..bn``, one per goal argument (``bi`` stands for ``xi``)."""

    params: list[str]

    @classmethod
    def for_arity(cls, n: int) -> "ParamSpace":
        return cls([f"b{i}" for i in range(1, n + 1)])

    @property
    def rho(self) -> dict[str, str]:
        return {b: f"x{i}" for i, b in enumerate(self.params, 1)}

    def __len__(self):
        return len(self.params)


@dataclass
class AbstractClause:
    index: int
    head: Pred
    nvars: int
    calls: tuple[tuple[Pred, tuple[int, ...]], ...]
    constraint: Ref
    n_constraints: int
    origin: int = -1

    @property
    def head_vars(self) -> list[str]:
        return [f"x{i}" for i in range(1, self.head.arity + 1)]

    @property
    def local_vars(self) -> list[str]:
        return [f"x{i}" for i in range(self.head.arity + 1, self.nvars + 1)]

    @property
    def atom_count(self) -> int:
        return 1 + len(self.calls) + self.n_constraints

    def __str__(self):
        head = Call(self.head, tuple(range(1, self.head.arity + 1)))
        parts = [str(Call(p, args)) for p, args in self.calls]
        if not self.constraint.is_true or not parts:
            parts.append(format_formula(self.constraint))
        return f"{head} :- {', '.join(parts)}."


@dataclass
class AbstractProgram:
    mgr: Manager
    clauses: list[AbstractClause]
    goal: Pred
    params: ParamSpace
    parametric: bool

    @property
    def predicates(self) -> list[Pred]:
        seen: dict[Pred, None] = {}
        for c in self.clauses:
            seen.setdefault(c.head, None)
            for p, _ in c.calls:
                seen.setdefault(p, None)
        return list(seen)

    @property
    def atom_count(self) -> int:
        return sum(c.atom_count for c in self.clauses)

    def dump(self) -> str:
        return "\n".join(str(c) for c in self.clauses) + "\n"


VAR_ORDERS = ("params-last", "params-first")


def make_manager(nvars: int, params: ParamSpace, var_order: str = "params-last") -> Manager:
    if var_order not in VAR_ORDERS:
        raise ValueError(f"unknown variable order {var_order!r}; choose from {', '.join(VAR_ORDERS)}")
    xs = [f"x{i}" for i in range(1, nvars + 1)]
    if var_order == "params-first":
        return Manager(params.params + xs)
    return Manager(xs + params.params)


def encode_seed(mgr: Manager, params: ParamSpace) -> Ref:
    """The parametric input: the conjunction of ``bi -> xi``."""
    acc = mgr.true
    for b, x in params.rho.items():
        acc = acc & mgr.var(b).implies(mgr.var(x))
    return acc


def abstract_compile(
    norm: list[NormClause],
    goal: Pred,
    builtins: BuiltinTable | None = None,
    *,
    parametric: bool = False,
    seed: str | Ref | None = None,
    var_order: str = "params-last",
    mgr: Manager | None = None,
) -> AbstractProgram:
    """Abstract every clause into Pos constraints and prepend the seed clause.

    ``seed`` replaces the non-parametric input ``1``; it is a formula over
    ``x1..xn`` (text or node).  Parametric mode always seeds with
    ``(b1 -> x1) & ... & (bn -> xn)``.
    """
    builtins = builtins if builtins is not None else BuiltinTable.default()
    params = ParamSpace.for_arity(goal.arity) if parametric else ParamSpace([])
    width = max([goal.arity] + [c.nvars for c in norm] + [a for (_, a) in builtins])
    if mgr is None:
        mgr = make_manager(width, params, var_order)
    else:
        for i in range(1, width + 1):
            mgr.declare(f"x{i}")
        for b in params.params:
            mgr.declare(b)

    patterns: dict[tuple[str, int], Ref] = {}

    def pattern(name: str, arity: int) -> Ref:
        key = (name, arity)
        if key not in patterns:
            if key not in builtins:
                raise TransformError(f"no success pattern for builtin {name}/{arity}")
            patterns[key] = parse_formula(builtins[key], mgr)
        return patterns[key]

    if parametric:
        if seed is not None:
            raise TransformError("an explicit input formula is only meaningful for non-parametric analysis")
        seed_ref = encode_seed(mgr, params)
        seed_atoms = goal.arity
    elif seed is None:
        seed_ref, seed_atoms = mgr.true, 0
    else:
        seed_ref = parse_formula(seed, mgr) if isinstance(seed, str) else seed
        allowed = {f"x{i}" for i in range(1, goal.arity + 1)}
        if not set(mgr.support(seed_ref)) <= allowed:
            raise TransformError(f"input formula may only mention x1..x{goal.arity}")
        seed_atoms = 1

    clauses = [AbstractClause(0, goal, goal.arity, (), seed_ref, seed_atoms)]
    for i, nc in enumerate(norm, 1):
        constraint = mgr.true
        calls = []
        count = 0
        for item in nc.body:
            if isinstance(item, Eq):
                lhs = mgr.var(f"x{item.lhs}")
                rhs = mgr.conj(mgr.var(f"x{a}") for a in item.args)
                constraint = constraint & lhs.iff(rhs)
                count += 1
            elif item.pred.kind == "builtin":
                pat = pattern(item.pred.name, item.pred.arity)
                renamed = mgr.rename({f"x{k}": f"x{a}" for k, a in enumerate(item.args, 1)}, pat)
                constraint = constraint & renamed
                count += 1
            else:
                calls.append((item.pred, item.args))
        clauses.append(AbstractClause(i, nc.head, nc.nvars, tuple(calls), constraint, count, nc.origin))
    return AbstractProgram(mgr, clauses, goal, params, parametric)
