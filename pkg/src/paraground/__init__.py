"""Parametric groundness analysis of logic programs over Pos, with ROBDDs."""
from .bdd import BddError, Manager, Ref
from .builtins import BuiltinTable
from .domain import ConElement, PosFormula, instantiate, nabla, nabla_inv
from .formula import format_formula, parse_formula
from .frontend import ParseError, SourceProgram, parse_program
from .pipeline import Analysis, ValidationFailed, analyze
from .transform import Pred

__all__ = [
    "Analysis",
    "BddError",
    "BuiltinTable",
    "ConElement",
    "Manager",
    "ParseError",
    "PosFormula",
    "Pred",
    "Ref",
    "SourceProgram",
    "ValidationFailed",
    "analyze",
    "format_formula",
    "instantiate",
    "nabla",
    "nabla_inv",
    "parse_formula",
    "parse_program",
]
