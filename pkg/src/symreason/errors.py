"""Error and warning types shared across parsers, engines, and the pipeline.

Parse problems are collected as `ParseError` records (all recoverable errors
in one pass, not first-fail) and raised together inside a `ParseFailure`.
Engine-level exceptions derive from `EngineError`; the pipeline surfaces them
to the self-refiner as execution errors rather than crashing.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum

from .ir import SourceSpan


class ParseErrorKind(Enum):
    SYNTAX = "Syntax"
    UNKNOWN_PREDICATE = "UnknownPredicate"
    ARITY_MISMATCH = "ArityMismatch"
    UNBOUND_VARIABLE = "UnboundVariable"
    UNDECLARED_VARIABLE = "UndeclaredVariable"
    EMPTY_SECTION = "EmptySection"
    MISSING_SECTION = "MissingSection"


@dataclass(frozen=True)
class ParseError:
    """One diagnostic, rendered so a self-refinement prompt can quote it."""

    span: SourceSpan
    kind: ParseErrorKind
    message: str

    def render(self) -> str:
        return "line %d, column %d: %s: %s" % (
            self.span.line,
            self.span.column,
            self.kind.value,
            self.message,
        )


class ParseFailure(Exception):
    """Raised by the parsers with every recoverable error gathered."""

    def __init__(self, errors: list[ParseError]):
        if not errors:
            raise ValueError("ParseFailure needs at least one error")
        self.errors = list(errors)
        super().__init__("; ".join(e.render() for e in self.errors))


class ParserWarning(UserWarning):
    """Non-fatal parser notes: ignored trailing prose, 0-ary predicates."""


class EngineError(Exception):
    """Base for solver failures the self-refiner can act on."""


class ResourceExhausted(EngineError):
    """A configured limit (facts, iterations, clauses, steps, wall clock)
    was hit before the engine reached a conclusion."""


class ClauseExplosion(ResourceExhausted):
    """CNF conversion exceeded the clause budget."""


class NonGroundQuery(EngineError):
    """Deductive queries must be ground and end with a boolean literal."""


class InconsistentProgram(EngineError):
    """Both a query and its boolean-flipped form are derivable."""


class InconsistentFacts(EngineError):
    """The fact set alone is contradictory (empty clause without the query)."""


class Unsatisfiable(EngineError):
    """Constraint propagation emptied a domain."""


class UnsatisfiableModel(EngineError):
    """A constraint model admits no solution, so options cannot be judged."""


class SolutionCapExceeded(EngineError):
    """Solution enumeration hit its cap with the search still incomplete."""


class OracleTooLarge(Exception):
    """Model enumeration bounds (universe size, atom count, no functions)
    were exceeded; the brute-force oracle refuses rather than guesses."""


class ResourceLimitWarning(UserWarning):
    """Verdict degraded to Unknown because a resource limit was hit."""


class ProviderError(Exception):
    """Text-generation provider failure: network, auth, missing fixture,
    exhausted script, or malformed response."""


class DatasetFormatError(Exception):
    """A dataset record violates the wire format."""


class MissingTemplate(Exception):
    """No prompt template shipped or configured for the requested id."""


def raise_if_past_deadline(deadline: float | None, what: str):
    """Engines call this inside their main loops; `deadline` is an absolute
    `time.monotonic()` timestamp set from the pipeline's wall-clock budget."""
    if deadline is not None and time.monotonic() > deadline:
        raise ResourceExhausted("%s exceeded its wall-clock budget" % what)
