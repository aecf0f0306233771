"""Shared symbolic intermediate representation.

Terms, atoms, first-order formulas, clauses, and the three-valued verdict
used by every parser and engine in the package.  All values are immutable
after construction and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Union


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Constant:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("constant name must be nonempty")


@dataclass(frozen=True)
class Variable:
    """A logic variable.  Rendered with a `$` marker (`$x1`); the marker is
    not part of the stored name."""

    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be nonempty")


@dataclass(frozen=True)
class IntLiteral:
    value: int


@dataclass(frozen=True)
class BoolLiteral:
    value: bool


@dataclass(frozen=True)
class FuncApp:
    """Function application.  Only ever created by Skolemization; the surface
    languages have no function symbols."""

    name: str
    args: tuple["Term", ...]

    def __post_init__(self):
        if not self.name:
            raise ValueError("function name must be nonempty")
        if len(self.args) < 1:
            raise ValueError("function application needs at least one argument")


Term = Union[Constant, Variable, IntLiteral, BoolLiteral, FuncApp]


def term_text(t: Term) -> str:
    """Canonical rendering of a term (`$x` marker on variables)."""
    if isinstance(t, Constant):
        return t.name
    if isinstance(t, Variable):
        return "$" + t.name
    if isinstance(t, IntLiteral):
        return str(t.value)
    if isinstance(t, BoolLiteral):
        return "True" if t.value else "False"
    if isinstance(t, FuncApp):
        return "%s(%s)" % (t.name, ", ".join(term_text(a) for a in t.args))
    raise TypeError("not a term: %r" % (t,))


def term_variables(t: Term) -> set[Variable]:
    if isinstance(t, Variable):
        return {t}
    if isinstance(t, FuncApp):
        out: set[Variable] = set()
        for a in t.args:
            out |= term_variables(a)
        return out
    return set()


def term_depth(t: Term) -> int:
    if isinstance(t, FuncApp):
        return 1 + max(term_depth(a) for a in t.args)
    return 1


# ---------------------------------------------------------------------------
# Atoms


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        if not self.predicate:
            raise ValueError("predicate name must be nonempty")

    @property
    def arity(self) -> int:
        return len(self.args)

    def is_ground(self) -> bool:
        return not any(term_variables(a) for a in self.args)

    def variables(self) -> set[Variable]:
        out: set[Variable] = set()
        for a in self.args:
            out |= term_variables(a)
        return out

    def text(self) -> str:
        if not self.args:
            return self.predicate + "()"
        return "%s(%s)" % (self.predicate, ", ".join(term_text(a) for a in self.args))


# ---------------------------------------------------------------------------
# First-order formulas
#
# `Atom` doubles as the leaf formula.  AndList/OrList keep the n-ary surface
# forms intact so printed traces match what the formulator produced; desugar
# folds them away before any engine sees them.


@dataclass(frozen=True)
class Not:
    sub: "FolFormula"


@dataclass(frozen=True)
class And:
    left: "FolFormula"
    right: "FolFormula"


@dataclass(frozen=True)
class Or:
    left: "FolFormula"
    right: "FolFormula"


@dataclass(frozen=True)
class AndList:
    items: tuple["FolFormula", ...]

    def __post_init__(self):
        if len(self.items) < 2:
            raise ValueError("AndList needs at least 2 members")


@dataclass(frozen=True)
class OrList:
    items: tuple["FolFormula", ...]

    def __post_init__(self):
        if len(self.items) < 2:
            raise ValueError("OrList needs at least 2 members")


@dataclass(frozen=True)
class Implies:
    left: "FolFormula"
    right: "FolFormula"


@dataclass(frozen=True)
class Equiv:
    left: "FolFormula"
    right: "FolFormula"


@dataclass(frozen=True)
class Xor:
    left: "FolFormula"
    right: "FolFormula"


@dataclass(frozen=True)
class Exists:
    var: Variable
    body: "FolFormula"


@dataclass(frozen=True)
class Forall:
    var: Variable
    body: "FolFormula"


FolFormula = Union[
    Atom, Not, And, Or, AndList, OrList, Implies, Equiv, Xor, Exists, Forall
]

BINARY_CONNECTIVES = (And, Or, Implies, Equiv, Xor)
LIST_CONNECTIVES = (AndList, OrList)
QUANTIFIERS = (Exists, Forall)


def free_variables(f: FolFormula) -> set[Variable]:
    """Variables occurring outside any binding quantifier."""
    if isinstance(f, Atom):
        return f.variables()
    if isinstance(f, Not):
        return free_variables(f.sub)
    if isinstance(f, BINARY_CONNECTIVES):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, LIST_CONNECTIVES):
        out: set[Variable] = set()
        for g in f.items:
            out |= free_variables(g)
        return out
    if isinstance(f, QUANTIFIERS):
        return free_variables(f.body) - {f.var}
    raise TypeError("not a formula: %r" % (f,))


def desugar(f: FolFormula) -> FolFormula:
    """Rewrite Xor/Equiv/AndList/OrList into the And/Or/Not/Implies core.

    Lists fold left-associatively; Xor(a,b) becomes And(Or(a,b), Not(And(a,b)))
    and Equiv(a,b) becomes And(Implies(a,b), Implies(b,a)).  Idempotent.
    """
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(desugar(f.sub))
    if isinstance(f, And):
        return And(desugar(f.left), desugar(f.right))
    if isinstance(f, Or):
        return Or(desugar(f.left), desugar(f.right))
    if isinstance(f, Implies):
        return Implies(desugar(f.left), desugar(f.right))
    if isinstance(f, Equiv):
        a, b = desugar(f.left), desugar(f.right)
        return And(Implies(a, b), Implies(b, a))
    if isinstance(f, Xor):
        a, b = desugar(f.left), desugar(f.right)
        return And(Or(a, b), Not(And(a, b)))
    if isinstance(f, AndList):
        items = [desugar(g) for g in f.items]
        acc = items[0]
        for g in items[1:]:
            acc = And(acc, g)
        return acc
    if isinstance(f, OrList):
        items = [desugar(g) for g in f.items]
        acc = items[0]
        for g in items[1:]:
            acc = Or(acc, g)
        return acc
    if isinstance(f, Exists):
        return Exists(f.var, desugar(f.body))
    if isinstance(f, Forall):
        return Forall(f.var, desugar(f.body))
    raise TypeError("not a formula: %r" % (f,))


def formula_atoms(f: FolFormula) -> set[Atom]:
    """Every atom occurring in the formula."""
    if isinstance(f, Atom):
        return {f}
    if isinstance(f, Not):
        return formula_atoms(f.sub)
    if isinstance(f, BINARY_CONNECTIVES):
        return formula_atoms(f.left) | formula_atoms(f.right)
    if isinstance(f, LIST_CONNECTIVES):
        out: set[Atom] = set()
        for g in f.items:
            out |= formula_atoms(g)
        return out
    if isinstance(f, QUANTIFIERS):
        return formula_atoms(f.body)
    raise TypeError("not a formula: %r" % (f,))


def formula_constants(f: FolFormula) -> set[str]:
    """Names of constants occurring anywhere in the formula."""
    out: set[str] = set()

    def from_term(t: Term):
        if isinstance(t, Constant):
            out.add(t.name)
        elif isinstance(t, FuncApp):
            for a in t.args:
                from_term(a)

    for atom in formula_atoms(f):
        for a in atom.args:
            from_term(a)
    return out


# ---------------------------------------------------------------------------
# Clauses


@dataclass(frozen=True)
class Literal:
    sign: bool
    atom: Atom

    def negated(self) -> "Literal":
        return Literal(not self.sign, self.atom)

    def text(self) -> str:
        return self.atom.text() if self.sign else "!" + self.atom.text()


@dataclass(frozen=True)
class Clause:
    """A disjunction of literals; the empty clause denotes contradiction."""

    literals: frozenset[Literal] = field(default_factory=frozenset)

    @classmethod
    def of(cls, lits: Iterable[Literal]) -> "Clause":
        return cls(frozenset(lits))

    def is_empty(self) -> bool:
        return not self.literals

    def is_tautology(self) -> bool:
        return any(lit.negated() in self.literals for lit in self.literals)

    def variables(self) -> set[Variable]:
        out: set[Variable] = set()
        for lit in self.literals:
            out |= lit.atom.variables()
        return out

    def sorted_literals(self) -> list[Literal]:
        """Literals in a stable order independent of hash seeds."""
        return sorted(self.literals, key=lambda l: (l.atom.text(), l.sign))

    def depth(self) -> int:
        depths = [
            term_depth(arg) for lit in self.literals for arg in lit.atom.args
        ]
        return max(depths, default=0)

    def text(self) -> str:
        if not self.literals:
            return "<empty>"
        return " | ".join(lit.text() for lit in self.sorted_literals())


# ---------------------------------------------------------------------------
# Verdicts and source positions


class TruthValue(Enum):
    PROVED = "Proved"
    DISPROVED = "Disproved"
    UNKNOWN = "Unknown"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SourceSpan:
    """1-based position of a token in parser input."""

    line: int
    column: int
    length: int = 0

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError("source positions are 1-based")
