"""symreason: parse logic problems into symbolic form, solve them with
deterministic engines, and orchestrate the formulate/solve/interpret loop."""

from .ir import (
    Atom,
    BoolLiteral,
    Clause,
    Constant,
    FolFormula,
    IntLiteral,
    Literal,
    SourceSpan,
    TruthValue,
    Variable,
    desugar,
    free_variables,
)

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "BoolLiteral",
    "Clause",
    "Constant",
    "FolFormula",
    "IntLiteral",
    "Literal",
    "SourceSpan",
    "TruthValue",
    "Variable",
    "desugar",
    "free_variables",
    "__version__",
]
