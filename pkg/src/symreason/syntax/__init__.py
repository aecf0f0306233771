"""Parsers and printers for the three symbolic surface languages."""

from .csp import (
    AllDifferent,
    Cmp,
    ConstraintExpr,
    CspConstraint,
    CspModel,
    CspOption,
    IntTerm,
    SumTerm,
    VarTerm,
    expr_variables,
    parse_csp,
    print_csp,
    print_expr,
)
from .fol import FolProblem, parse_fol, print_fol, print_formula
from .lp import (
    LpFact,
    LpProgram,
    LpRule,
    PredicateSig,
    parse_lp,
    print_atom,
    print_lp,
)

__all__ = [
    "AllDifferent",
    "Cmp",
    "ConstraintExpr",
    "CspConstraint",
    "CspModel",
    "CspOption",
    "FolProblem",
    "IntTerm",
    "LpFact",
    "LpProgram",
    "LpRule",
    "PredicateSig",
    "SumTerm",
    "VarTerm",
    "expr_variables",
    "parse_csp",
    "parse_fol",
    "parse_lp",
    "print_atom",
    "print_csp",
    "print_expr",
    "print_fol",
    "print_formula",
    "print_lp",
]
