"""SCC-ordered bottom-up evaluation of an abstract program."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .bdd import Ref
from .domain import PosFormula
from .transform import AbstractClause, AbstractProgram, Pred

DEFAULT_MAX_ITERS = 10_000


class SolverError(Exception):
    """Internal invariant violated (bad SCC order, runaway iteration...)."""


@dataclass
class IterationStats:
    iterations: list[int] = field(default_factory=list)  # per component, in order
    node_counts: dict[str, int] = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def total_iterations(self) -> int:
        return sum(self.iterations)

    def as_dict(self) -> dict:
        return {
            "components": len(self.iterations),
            "iterations": list(self.iterations),
            "total_iterations": self.total_iterations,
            "node_counts": dict(self.node_counts),
            "seconds": self.seconds,
        }


@dataclass
class AnalysisResult:
    program: AbstractProgram
    formulas: dict[Pred, Ref]

    def __getitem__(self, pred: Pred) -> Ref:
        return self.formulas[pred]

    def get(self, label: str) -> Ref:
        """Look up by ``"call_app/3"``-style label."""
        for p, f in self.formulas.items():
            if str(p) == label:
                return f
        raise KeyError(label)

    def reachable(self, pred: Pred) -> bool:
        return not self.formulas[pred].is_false

    def pos(self, pred: Pred) -> PosFormula:
        scope = [f"x{i}" for i in range(1, pred.arity + 1)] + list(self.program.params.params)
        return PosFormula(self.formulas[pred], frozenset(scope))

    def check(self) -> None:
        """Reachable entries are positive over their scope; others are FALSE."""
        for pred, f in self.formulas.items():
            if f.is_false:
                continue
            if not self.pos(pred).is_positive():
                raise SolverError(f"result for {pred} is not positive")
            scope = self.pos(pred).scope
            if not set(f.mgr.support(f)) <= scope:
                raise SolverError(f"result for {pred} escapes its scope")


def clause_transfer(c: AbstractClause, current: dict[Pred, Ref], params: list[str]) -> Ref:
    """One application of clause ``c`` to the current interpretation.

    Conjoins the clause constraint with every body result renamed onto the
    call's argument variables, then hides the clause-local variables.
    Strict in FALSE.
    """
    mgr = c.constraint.mgr
    acc = c.constraint
    if acc.is_false:
        return acc
    for pred, args in c.calls:
        try:
            f = current[pred]
        except KeyError:
            raise SolverError(f"no entry for {pred} while evaluating clause {c.index}") from None
        if f.is_false:
            return f
        acc = acc & mgr.rename({f"x{k}": f"x{a}" for k, a in enumerate(args, 1)}, f)
        if acc.is_false:
            return acc
    local = c.local_vars
    if local:
        acc = mgr.exists(local, acc)
    return acc


def solve(
    program: AbstractProgram,
    order: list[list[int]],
    max_iters: int = DEFAULT_MAX_ITERS,
    self_loops: set[int] | None = None,
) -> tuple[AnalysisResult, IterationStats]:
    """Least fixpoint by round-robin iteration inside each component.

    ``self_loops`` marks singleton components that depend on themselves;
    when omitted it is recomputed from the clauses.
    """
    start = time.perf_counter()
    mgr = program.mgr
    params = program.params.params
    current: dict[Pred, Ref] = {p: mgr.false for p in program.predicates}
    by_index = {c.index: c for c in program.clauses}
    if sorted(i for comp in order for i in comp) != sorted(by_index):
        raise SolverError("component order does not cover every clause exactly once")
    if self_loops is None:
        self_loops = {c.index for c in program.clauses if any(p == c.head for p, _ in c.calls)}

    last_def: dict[Pred, int] = {}
    for pos, comp in enumerate(order):
        for i in comp:
            last_def[by_index[i].head] = pos

    stats = IterationStats()
    for pos, comp in enumerate(order):
        clauses = [by_index[i] for i in comp]
        # everything a component reads must be final or produced inside it
        for c in clauses:
            for p, _ in c.calls:
                if last_def.get(p, -1) > pos:
                    raise SolverError(f"clause {c.index} reads {p} before it is computed")
        recursive = len(comp) > 1 or comp[0] in self_loops
        rounds = 0
        while True:
            rounds += 1
            if rounds > max_iters:
                raise SolverError(f"component {comp} did not stabilise within {max_iters} iterations")
            changed = False
            for c in clauses:
                new = clause_transfer(c, current, params)
                if new.is_false:
                    continue
                old = current[c.head]
                joined = old | new
                if joined != old:
                    current[c.head] = joined
                    changed = True
            if not recursive or not changed:
                break
        stats.iterations.append(rounds)
    stats.seconds = time.perf_counter() - start
    stats.node_counts = {str(p): mgr.node_count(f) for p, f in current.items()}
    return AnalysisResult(program, current), stats

