"""End-to-end analysis: source text in, call/answer patterns out."""
from __future__ import annotations

import time
from dataclasses import dataclass

from .bdd import Manager, Ref
from .builtins import BuiltinTable
from .frontend import Diagnostic, SourceProgram, has_errors, parse_program, validate
from .solver import DEFAULT_MAX_ITERS, AnalysisResult, IterationStats, solve
from .transform import (
    AbstractProgram,
    CallGraph,
    MagicProgram,
    abstract_compile,
    build_call_graph,
    magic_transform,
    normalize,
    scc_order,
)


class ValidationFailed(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics if d.severity == "error"))

    @property
    def unsupported(self) -> bool:
        return any(d.kind == "unsupported" and d.severity == "error" for d in self.diagnostics)


@dataclass
class Analysis:
    source: SourceProgram
    magic: MagicProgram
    graph: CallGraph
    order: list[list[int]]
    abstract: AbstractProgram
    result: AnalysisResult
    stats: IterationStats
    diagnostics: list[Diagnostic]

    @property
    def mgr(self) -> Manager:
        return self.abstract.mgr

    @property
    def params(self) -> list[str]:
        return self.abstract.params.params

    def __getitem__(self, label: str) -> Ref:
        return self.result.get(label)


def analyze(
    program: SourceProgram | str,
    *,
    parametric: bool | None = None,
    seed: str | Ref | None = None,
    builtins: BuiltinTable | None = None,
    var_order: str = "params-last",
    max_iters: int = DEFAULT_MAX_ITERS,
    mgr: Manager | None = None,
    check: bool = True,
) -> Analysis:
    """Run the whole pipeline.

    ``parametric=None`` obeys the program's directive.  ``seed`` is the
    non-parametric input formula over ``x1..xn`` (default ``1``).  Passing
    ``mgr`` lets several analyses share one manager so that their results
    can be compared node for node.
    """
    start = time.perf_counter()
    if isinstance(program, str):
        program = parse_program(program)
    builtins = builtins if builtins is not None else BuiltinTable.default()
    diags = validate(program, builtins)
    if has_errors(diags):
        raise ValidationFailed(diags)
    if parametric is None:
        parametric = program.parametric

    magic = magic_transform(program, builtins)
    graph = build_call_graph(magic)
    order = scc_order(graph)
    norm = normalize(magic)
    abstract = abstract_compile(
        norm, magic.goal, builtins, parametric=parametric, seed=seed, var_order=var_order, mgr=mgr
    )
    self_loops = {n for n in graph.nodes if graph.has_self_loop(n)}
    result, stats = solve(abstract, order, max_iters=max_iters, self_loops=self_loops)
    if check:
        result.check()
    stats.seconds = time.perf_counter() - start
    return Analysis(program, magic, graph, order, abstract, result, stats, diags)
