"""Clausal-form conversion: desugar, NNF, standardize apart, Skolemize,
distribute, and collect clauses.

The output is equisatisfiable with the input.  Skolem symbols are drawn from
the `skc<N>` / `skf<N>` namespaces and never collide with problem constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ClauseExplosion
from ..ir import (
    And,
    Atom,
    Clause,
    Constant,
    Exists,
    FolFormula,
    Forall,
    FuncApp,
    Implies,
    Literal,
    Not,
    Or,
    Term,
    Variable,
    desugar,
    free_variables,
)
from .unify import Subst, apply_subst_atom, canonicalize_clause


@dataclass
class SkolemState:
    """Fresh-name source for Skolem constants and functions; `reserved`
    holds the problem's own constant names so generated ones never collide."""

    counter: int = 0
    reserved: frozenset[str] = frozenset()
    generated: list[str] = field(default_factory=list)

    def _fresh(self, stem: str) -> str:
        while True:
            self.counter += 1
            name = "%s%d" % (stem, self.counter)
            if name not in self.reserved:
                self.generated.append(name)
                return name

    def fresh_constant(self) -> Constant:
        return Constant(self._fresh("skc"))

    def fresh_function(self) -> str:
        return self._fresh("skf")


def to_nnf(f: FolFormula) -> FolFormula:
    """Negation normal form of a desugared formula: Implies eliminated,
    negations pushed onto atoms, quantifier duals applied."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Implies):
        return to_nnf(Or(Not(f.left), f.right))
    if isinstance(f, And):
        return And(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Or):
        return Or(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Forall):
        return Forall(f.var, to_nnf(f.body))
    if isinstance(f, Exists):
        return Exists(f.var, to_nnf(f.body))
    if isinstance(f, Not):
        g = f.sub
        if isinstance(g, Atom):
            return f
        if isinstance(g, Not):
            return to_nnf(g.sub)
        if isinstance(g, And):
            return Or(to_nnf(Not(g.left)), to_nnf(Not(g.right)))
        if isinstance(g, Or):
            return And(to_nnf(Not(g.left)), to_nnf(Not(g.right)))
        if isinstance(g, Implies):
            return to_nnf(Not(Or(Not(g.left), g.right)))
        if isinstance(g, Forall):
            return Exists(g.var, to_nnf(Not(g.body)))
        if isinstance(g, Exists):
            return Forall(g.var, to_nnf(Not(g.body)))
    raise ValueError("formula must be desugared before NNF: %r" % (f,))


@dataclass
class _Renamer:
    counter: int = 0

    def fresh(self) -> Variable:
        self.counter += 1
        return Variable("v%d" % self.counter)


def standardize_apart(f: FolFormula, renamer: _Renamer) -> FolFormula:
    """Give every quantifier its own variable; the shared counter keeps
    names distinct across a whole formula list."""

    def rec(g: FolFormula, env: Subst) -> FolFormula:
        if isinstance(g, Atom):
            return apply_subst_atom(g, env)
        if isinstance(g, Not):
            return Not(rec(g.sub, env))
        if isinstance(g, And):
            return And(rec(g.left, env), rec(g.right, env))
        if isinstance(g, Or):
            return Or(rec(g.left, env), rec(g.right, env))
        if isinstance(g, (Forall, Exists)):
            fresh = renamer.fresh()
            inner = dict(env)
            inner[g.var.name] = fresh
            ctor = Forall if isinstance(g, Forall) else Exists
            return ctor(fresh, rec(g.body, inner))
        raise ValueError("formula must be in NNF core form: %r" % (g,))

    return rec(f, {})


def skolemize(f: FolFormula, state: SkolemState) -> FolFormula:
    """Drop quantifiers from an NNF, standardized-apart, closed formula.

    Existentials become Skolem constants, or Skolem functions of the
    universals in scope; remaining variables are implicitly universal.
    """

    def rec(g: FolFormula, universals: tuple[Variable, ...], env: Subst) -> FolFormula:
        if isinstance(g, Atom):
            return apply_subst_atom(g, env)
        if isinstance(g, Not):
            return Not(rec(g.sub, universals, env))
        if isinstance(g, And):
            return And(rec(g.left, universals, env), rec(g.right, universals, env))
        if isinstance(g, Or):
            return Or(rec(g.left, universals, env), rec(g.right, universals, env))
        if isinstance(g, Forall):
            return rec(g.body, universals + (g.var,), env)
        if isinstance(g, Exists):
            witness: Term
            if universals:
                witness = FuncApp(state.fresh_function(), universals)
            else:
                witness = state.fresh_constant()
            inner = dict(env)
            inner[g.var.name] = witness
            return rec(g.body, universals, inner)
        raise ValueError("formula must be in NNF core form: %r" % (g,))

    return rec(f, (), {})


def _matrix_clauses(f: FolFormula, max_clauses: int) -> list[frozenset[Literal]]:
    """Distribute Or over And on a quantifier-free NNF matrix."""
    if isinstance(f, Atom):
        return [frozenset([Literal(True, f)])]
    if isinstance(f, Not):
        if not isinstance(f.sub, Atom):
            raise ValueError("matrix not in NNF: %r" % (f,))
        return [frozenset([Literal(False, f.sub)])]
    if isinstance(f, And):
        left = _matrix_clauses(f.left, max_clauses)
        right = _matrix_clauses(f.right, max_clauses)
        if len(left) + len(right) > max_clauses:
            raise ClauseExplosion(
                "CNF conversion exceeded %d clauses" % max_clauses
            )
        return left + right
    if isinstance(f, Or):
        left = _matrix_clauses(f.left, max_clauses)
        right = _matrix_clauses(f.right, max_clauses)
        if len(left) * len(right) > max_clauses:
            raise ClauseExplosion(
                "CNF conversion exceeded %d clauses" % max_clauses
            )
        return [a | b for a in left for b in right]
    raise ValueError("matrix not in NNF: %r" % (f,))


def clausify(
    f: FolFormula,
    state: SkolemState | None = None,
    renamer: _Renamer | None = None,
    max_clauses: int = 20_000,
) -> list[Clause]:
    """Full pipeline for one closed formula; raises ClauseExplosion when the
    output would exceed `max_clauses`.  Tautologies and duplicate literals
    are dropped (both preserve equisatisfiability)."""
    if free_variables(f):
        raise ValueError("clausify requires a closed formula")
    state = state if state is not None else SkolemState()
    renamer = renamer if renamer is not None else _Renamer()
    matrix = skolemize(standardize_apart(to_nnf(desugar(f)), renamer), state)
    out: list[Clause] = []
    seen: set[frozenset[Literal]] = set()
    for lits in _matrix_clauses(matrix, max_clauses):
        clause = canonicalize_clause(Clause(lits))
        if clause.is_tautology() or clause.literals in seen:
            continue
        seen.add(clause.literals)
        out.append(clause)
    return out


def clausify_all(
    formulas: list[FolFormula],
    reserved: frozenset[str] = frozenset(),
    max_clauses: int = 20_000,
) -> list[Clause]:
    """Clausify a formula list with shared Skolem and renaming state, so
    names never clash across formulas."""
    state = SkolemState(reserved=reserved)
    renamer = _Renamer()
    out: list[Clause] = []
    seen: set[frozenset[Literal]] = set()
    for f in formulas:
        for clause in clausify(f, state, renamer, max_clauses):
            if clause.literals not in seen:
                seen.add(clause.literals)
                out.append(clause)
        if len(out) > max_clauses:
            raise ClauseExplosion(
                "CNF conversion exceeded %d clauses" % max_clauses
            )
    return out
