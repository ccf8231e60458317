"""Command-line driver.

    analyze PROGRAM.pl [--parametric auto|yes|no] [--instantiate b1=1,b2=0]
                       [--input FORMULA] [--json] [--dump-abstract]
                       [--var-order params-last|params-first]
                       [--builtins FILE] [--max-iters N]
    analyze --bench DIR [--reps N]

Parameters are written ``b1..bn``; ``bi`` stands for "argument i of the
goal is ground".  Exit codes: 0 success, 1 parse/validation/usage error,
2 unsupported construct, 3 internal error.
"""
from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .bdd import BddError
from .builtins import BuiltinTable, BuiltinTableError
from .domain import ConElement, DomainError, instantiate
from .formula import FormulaSyntaxError, cnf_clauses, format_formula
from .frontend import ParseError, parse_program
from .pipeline import Analysis, ValidationFailed, analyze
from .solver import DEFAULT_MAX_ITERS, SolverError
from .transform import VAR_ORDERS, TransformError

SCHEMA_VERSION = 1

EXIT_OK, EXIT_ERROR, EXIT_UNSUPPORTED, EXIT_INTERNAL = 0, 1, 2, 3

_FORMULA = {
    "type": "object",
    "required": ["cnf", "pretty"],
    "properties": {
        "cnf": {"type": "array", "items": {"type": "array", "items": {"type": "string"}}},
        "pretty": {"type": "string"},
    },
}

# JSON Schema of the --json report
REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["schema_version", "program", "goal", "mode", "params", "predicates", "stats"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "program": {"type": "string"},
        "goal": {"type": "string", "pattern": "^.+/[0-9]+$"},
        "mode": {"enum": ["parametric", "non-parametric"]},
        "params": {"type": "array", "items": {"type": "string"}},
        "instantiated": {"type": ["object", "null"], "additionalProperties": {"enum": [0, 1]}},
        "input": {"type": ["string", "null"]},
        "predicates": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["call", "ans", "reachable"],
                "properties": {"call": _FORMULA, "ans": _FORMULA, "reachable": {"type": "boolean"}},
            },
        },
        "stats": {
            "type": "object",
            "required": ["atom_count", "components", "total_iterations", "seconds"],
        },
    },
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # keep exit code 2 for unsupported constructs
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="analyze", description="Parametric groundness analysis of logic programs.")
    p.add_argument("program", nargs="?", help="source file (.pl)")
    p.add_argument("--parametric", choices=["auto", "yes", "no"], default="auto",
                   help="auto obeys the file's parametric/1 directive")
    p.add_argument("--instantiate", metavar="b1=0|1,...",
                   help="instantiate parametric results; unnamed parameters default to 0")
    p.add_argument("--input", metavar="FORMULA", help="non-parametric input over x1..xn (default 1)")
    p.add_argument("--json", action="store_true", help="structured report on stdout")
    p.add_argument("--dump-abstract", action="store_true", help="print the compiled abstract program")
    p.add_argument("--var-order", choices=VAR_ORDERS, default="params-last")
    p.add_argument("--builtins", metavar="FILE", help="extra builtin success patterns")
    p.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    p.add_argument("--bench", metavar="DIR", help="benchmark every .pl file in DIR")
    p.add_argument("--reps", type=int, default=5, help="repetitions per measurement (bench)")
    return p


def parse_instantiation(text: str, params: list[str]) -> ConElement:
    members = set()
    seen = set()
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, sep, value = item.partition("=")
        name, value = name.strip(), value.strip()
        if not sep or value not in ("0", "1"):
            raise UsageError(f"bad instantiation item {item!r}; expected b<i>=0 or b<i>=1")
        if name not in params:
            raise UsageError(f"unknown parameter {name!r}; parameters are {', '.join(params) or 'none'}")
        if name in seen:
            raise UsageError(f"parameter {name} given twice")
        seen.add(name)
        if value == "1":
            members.add(name)
    return ConElement(frozenset(members))


@dataclass
class RunReport:
    analysis: Analysis
    program: str
    instantiated: ConElement | None = None
    input: str | None = None

    @property
    def mode(self) -> str:
        return "parametric" if self.analysis.abstract.parametric else "non-parametric"

    def formulas(self):
        """``(name, arity) -> (call, ans)`` in analysis order, instantiated if requested."""
        an = self.analysis
        out: dict[tuple[str, int], dict[str, object]] = {}
        for pred in an.abstract.predicates:
            f = an.result[pred]
            if self.instantiated is not None:
                f = instantiate(f, self.instantiated, an.params)
            out.setdefault((pred.name, pred.arity), {"call": an.mgr.false, "ans": an.mgr.false})[pred.kind] = f
        return out

    def to_dict(self) -> dict:
        an = self.analysis
        preds = {}
        for (name, arity), fs in self.formulas().items():
            preds[f"{name}/{arity}"] = {
                kind: {"cnf": cnf_clauses(fs[kind]), "pretty": format_formula(fs[kind])} for kind in ("call", "ans")
            } | {"reachable": not fs["call"].is_false}
        stats = an.stats.as_dict() | {"atom_count": an.abstract.atom_count}
        inst = None
        if self.instantiated is not None:
            inst = {b: int(b in self.instantiated.members) for b in an.params}
        return {
            "schema_version": SCHEMA_VERSION,
            "program": self.program,
            "goal": f"{an.abstract.goal.name}/{an.abstract.goal.arity}",
            "mode": self.mode,
            "params": list(an.params),
            "instantiated": inst,
            "input": self.input,
            "predicates": preds,
            "stats": stats,
        }

    def to_text(self) -> str:
        an = self.analysis
        goal = an.abstract.goal
        head = f"% {self.program}: goal {goal.name}/{goal.arity}, {self.mode}"
        if an.params:
            head += f" ({' '.join(an.params)})"
        lines = [head]
        if self.instantiated is not None:
            vals = ", ".join(f"{b}={int(b in self.instantiated.members)}" for b in an.params)
            lines.append(f"% instantiated at {vals}")
        if self.input is not None:
            lines.append(f"% input {self.input}")
        for (name, arity), fs in self.formulas().items():
            for kind in ("call", "ans"):
                lines.append(f"{kind}_{name}/{arity}: {format_formula(fs[kind])}")
        return "\n".join(lines) + "\n"


def run(args: argparse.Namespace, out=None) -> int:
    out = out if out is not None else sys.stdout
    if args.bench:
        if args.program:
            raise UsageError("--bench takes a directory, not a program")
        rows = bench(Path(args.bench), args.reps, builtins=_builtins(args), out_err=sys.stderr)
        write_csv(rows, out)
        return EXIT_OK if all(r.error is None for r in rows) else EXIT_ERROR
    if not args.program:
        raise UsageError("a program file is required")
    if args.max_iters < 1:
        raise UsageError("--max-iters must be positive")
    text = Path(args.program).read_text()
    program = parse_program(text)
    parametric = {"auto": None, "yes": True, "no": False}[args.parametric]
    if parametric is None:
        parametric = program.parametric
    if parametric and args.input is not None:
        raise UsageError("--input only applies to non-parametric analysis")
    if not parametric and args.instantiate is not None:
        raise UsageError("--instantiate only applies to parametric analysis")
    an = analyze(
        program,
        parametric=parametric,
        seed=args.input,
        builtins=_builtins(args),
        var_order=args.var_order,
        max_iters=args.max_iters,
    )
    inst = parse_instantiation(args.instantiate, an.params) if args.instantiate is not None else None
    report = RunReport(an, args.program, inst, args.input)
    if args.dump_abstract and not args.json:
        out.write(an.abstract.dump())
    if args.json:
        data = report.to_dict()
        if args.dump_abstract:
            data["abstract"] = an.abstract.dump().splitlines()
        json.dump(data, out, indent=2)
        out.write("\n")
    else:
        out.write(report.to_text())
    return EXIT_OK


def _builtins(args) -> BuiltinTable:
    if args.builtins:
        return BuiltinTable.load(args.builtins)
    return BuiltinTable.default()


# -- benchmark ----------------------------------------------------------------


@dataclass
class BenchRow:
    program: str
    goal: str
    size: int
    t_parametric: float
    t_nonparametric: float
    error: str | None = None

    @property
    def ratio(self) -> float:
        return self.t_parametric / self.t_nonparametric if self.t_nonparametric > 0 else float("inf")


def _time(fn, reps: int) -> float:
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def bench(corpus: Path, reps: int, builtins: BuiltinTable | None = None, out_err=None) -> list[BenchRow]:
    """Median wall time of parametric and non-parametric analysis per program.

    Each analysis builds its own manager, so times include setup.
    """
    if reps < 1:
        raise UsageError("--reps must be at least 1")
    if not corpus.is_dir():
        raise UsageError(f"{corpus} is not a directory")
    rows = []
    for path in sorted(corpus.glob("*.pl")):
        try:
            program = parse_program(path.read_text())
            an = analyze(program, parametric=True, builtins=builtins)
            tp = _time(lambda: analyze(program, parametric=True, builtins=builtins, check=False), reps)
            tn = _time(lambda: analyze(program, parametric=False, builtins=builtins, check=False), reps)
            goal = f"{program.goal[0]}/{program.goal[1]}"
            rows.append(BenchRow(path.name, goal, an.abstract.atom_count, tp, tn))
        except Exception as exc:  # reported, run continues
            if out_err is not None:
                print(f"{path.name}: {exc}", file=out_err)
            rows.append(BenchRow(path.name, "", 0, 0.0, 0.0, error=str(exc)))
    return rows


def write_csv(rows: list[BenchRow], out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["program", "goal", "size", "t_parametric", "t_nonparametric", "ratio"])
    ok = [r for r in rows if r.error is None]
    for r in rows:
        if r.error is not None:
            w.writerow([r.program, "", "", "", "", "error"])
        else:
            w.writerow([r.program, r.goal, r.size, f"{r.t_parametric:.6f}", f"{r.t_nonparametric:.6f}", f"{r.ratio:.3f}"])
    tp = sum(r.t_parametric for r in ok)
    tn = sum(r.t_nonparametric for r in ok)
    ratio = f"{tp / tn:.3f}" if tn > 0 else ""
    w.writerow(["TOTAL", "", sum(r.size for r in ok), f"{tp:.6f}", f"{tn:.6f}", ratio])


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return run(args)
    except UsageError as exc:
        print(f"analyze: usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ValidationFailed as exc:
        for d in exc.diagnostics:
            print(f"analyze: {d}", file=sys.stderr)
        return EXIT_UNSUPPORTED if exc.unsupported else EXIT_ERROR
    except (ParseError, FormulaSyntaxError, BuiltinTableError, TransformError, OSError) as exc:
        print(f"analyze: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (SolverError, DomainError, BddError) as exc:
        print(f"analyze: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:
        print(f"analyze: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
