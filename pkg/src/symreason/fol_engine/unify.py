"""Unification and matching over terms, atoms, and literals.

Substitutions map variable names to terms.  `unify_*` is symmetric with an
occurs check; `match_*` is one-way (only pattern variables bind), which is
what subsumption needs.
"""

from __future__ import annotations

from ..ir import Atom, Clause, FuncApp, Literal, Term, Variable

Subst = dict[str, Term]


def walk(t: Term, subst: Subst) -> Term:
    """Follow variable bindings to the representative term."""
    while isinstance(t, Variable) and t.name in subst:
        t = subst[t.name]
    return t


def apply_subst_term(t: Term, subst: Subst) -> Term:
    t = walk(t, subst)
    if isinstance(t, FuncApp):
        return FuncApp(t.name, tuple(apply_subst_term(a, subst) for a in t.args))
    return t


def apply_subst_atom(atom: Atom, subst: Subst) -> Atom:
    return Atom(atom.predicate, tuple(apply_subst_term(a, subst) for a in atom.args))


def apply_subst_literal(lit: Literal, subst: Subst) -> Literal:
    return Literal(lit.sign, apply_subst_atom(lit.atom, subst))


def apply_subst_clause(clause: Clause, subst: Subst) -> Clause:
    return Clause.of(apply_subst_literal(lit, subst) for lit in clause.literals)


def occurs(name: str, t: Term, subst: Subst) -> bool:
    t = walk(t, subst)
    if isinstance(t, Variable):
        return t.name == name
    if isinstance(t, FuncApp):
        return any(occurs(name, a, subst) for a in t.args)
    return False


def unify_terms(t1: Term, t2: Term, subst: Subst | None = None) -> Subst | None:
    """Most general unifier extending `subst`, or None."""
    if subst is None:
        subst = {}
    t1 = walk(t1, subst)
    t2 = walk(t2, subst)
    if isinstance(t1, Variable):
        if isinstance(t2, Variable) and t1.name == t2.name:
            return subst
        if occurs(t1.name, t2, subst):
            return None
        out = dict(subst)
        out[t1.name] = t2
        return out
    if isinstance(t2, Variable):
        return unify_terms(t2, t1, subst)
    if isinstance(t1, FuncApp) and isinstance(t2, FuncApp):
        if t1.name != t2.name or len(t1.args) != len(t2.args):
            return None
        for a, b in zip(t1.args, t2.args):
            subst = unify_terms(a, b, subst)
            if subst is None:
                return None
        return subst
    return subst if t1 == t2 else None


def unify_atoms(a1: Atom, a2: Atom, subst: Subst | None = None) -> Subst | None:
    if a1.predicate != a2.predicate or a1.arity != a2.arity:
        return None
    if subst is None:
        subst = {}
    for x, y in zip(a1.args, a2.args):
        subst = unify_terms(x, y, subst)
        if subst is None:
            return None
    return subst


def match_term(pattern: Term, target: Term, subst: Subst) -> Subst | None:
    """One-way match: pattern variables bind to target terms, target
    variables are treated as fixed symbols."""
    if isinstance(pattern, Variable):
        bound = subst.get(pattern.name)
        if bound is None:
            out = dict(subst)
            out[pattern.name] = target
            return out
        return subst if bound == target else None
    if isinstance(pattern, FuncApp):
        if (
            not isinstance(target, FuncApp)
            or pattern.name != target.name
            or len(pattern.args) != len(target.args)
        ):
            return None
        for p, t in zip(pattern.args, target.args):
            subst = match_term(p, t, subst)
            if subst is None:
                return None
        return subst
    return subst if pattern == target else None


def match_atom(pattern: Atom, target: Atom, subst: Subst) -> Subst | None:
    if pattern.predicate != target.predicate or pattern.arity != target.arity:
        return None
    for p, t in zip(pattern.args, target.args):
        subst = match_term(p, t, subst)
        if subst is None:
            return None
    return subst


def rename_term(t: Term, mapping: dict[str, Variable]) -> Term:
    """Simultaneous variable renaming (no chaining, so swaps are safe)."""
    if isinstance(t, Variable):
        return mapping.get(t.name, t)
    if isinstance(t, FuncApp):
        return FuncApp(t.name, tuple(rename_term(a, mapping) for a in t.args))
    return t


def rename_clause_vars(clause: Clause, mapping: dict[str, Variable]) -> Clause:
    return Clause.of(
        Literal(
            lit.sign,
            Atom(
                lit.atom.predicate,
                tuple(rename_term(a, mapping) for a in lit.atom.args),
            ),
        )
        for lit in clause.literals
    )


def rename_clause(clause: Clause, prefix: str) -> Clause:
    """Freshen every variable by prefixing its name (dots keep renamed names
    out of the canonical `x<N>` namespace)."""
    mapping = {v.name: Variable(prefix + v.name) for v in clause.variables()}
    return rename_clause_vars(clause, mapping)


def canonicalize_clause(clause: Clause) -> Clause:
    """Rename variables to x0, x1, ... in first-appearance order over the
    stable literal ordering; equal-up-to-renaming clauses get equal forms
    and variable names never accumulate across inferences."""
    mapping: dict[str, Variable] = {}

    def visit(t: Term):
        if isinstance(t, Variable):
            if t.name not in mapping:
                mapping[t.name] = Variable("x%d" % len(mapping))
        elif isinstance(t, FuncApp):
            for a in t.args:
                visit(a)

    for lit in clause.sorted_literals():
        for arg in lit.atom.args:
            visit(arg)
    return rename_clause_vars(clause, mapping)
