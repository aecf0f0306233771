"""Brute-force finite-model oracle for function-free clause sets.

Clauses are grounded over a small constant universe, every interpretation of
the resulting ground atoms is checked (vectorized over numpy bitmask chunks),
and entailment is decided by the textbook reduction: Facts entail Q iff
Facts plus not-Q has no model.  Deliberately independent of the resolution
engine so the two can check each other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..errors import InconsistentFacts, OracleTooLarge
from ..ir import (
    And,
    AndList,
    Atom,
    Clause,
    Constant,
    Equiv,
    Exists,
    FolFormula,
    Forall,
    FuncApp,
    Implies,
    Literal,
    Not,
    Or,
    OrList,
    TruthValue,
    Variable,
    Xor,
    free_variables,
)

MAX_UNIVERSE = 4
MAX_GROUND_ATOMS = 24
_CHUNK = 1 << 20


@dataclass(frozen=True)
class ModelCount:
    satisfiable: bool
    model_count: int
    ground_atoms: int


def _require_function_free(clauses: list[Clause]):
    for clause in clauses:
        for lit in clause.literals:
            if any(isinstance(a, FuncApp) for a in lit.atom.args):
                raise OracleTooLarge(
                    "clause %s contains a function symbol; enumeration over "
                    "a finite universe would be unsound" % clause.text()
                )


def ground_clauses(
    clauses: list[Clause], universe: list[Constant]
) -> list[frozenset[Literal]]:
    """Instantiate every clause over all assignments of universe constants
    to its variables."""
    out: list[frozenset[Literal]] = []
    for clause in clauses:
        variables = sorted(clause.variables(), key=lambda v: v.name)
        if not variables:
            out.append(clause.literals)
            continue
        for combo in itertools.product(universe, repeat=len(variables)):
            env = {v.name: c for v, c in zip(variables, combo)}
            lits = []
            for lit in clause.sorted_literals():
                args = tuple(
                    env[a.name] if isinstance(a, Variable) else a
                    for a in lit.atom.args
                )
                lits.append(Literal(lit.sign, Atom(lit.atom.predicate, args)))
            out.append(frozenset(lits))
    return out


def _atom_table(ground: list[frozenset[Literal]]) -> dict[Atom, int]:
    atoms = sorted(
        {lit.atom for clause in ground for lit in clause},
        key=lambda a: a.text(),
    )
    if len(atoms) > MAX_GROUND_ATOMS:
        raise OracleTooLarge(
            "%d ground atoms exceed the enumeration bound of %d"
            % (len(atoms), MAX_GROUND_ATOMS)
        )
    return {a: i for i, a in enumerate(atoms)}


def _clause_masks(
    ground: list[frozenset[Literal]], index: dict[Atom, int]
) -> list[tuple[int, int]]:
    masks = []
    for clause in ground:
        pos = neg = 0
        for lit in clause:
            bit = 1 << index[lit.atom]
            if lit.sign:
                pos |= bit
            else:
                neg |= bit
        masks.append((pos, neg))
    return sorted(set(masks))


def _count_models(masks: list[tuple[int, int]], n_atoms: int) -> int:
    """Interpretations are integers whose bit i gives atom i's truth value;
    a clause (pos, neg) holds iff a pos bit is set or a neg bit is clear."""
    if any(pos == 0 and neg == 0 for pos, neg in masks):
        return 0
    total = 1 << n_atoms
    count = 0
    for start in range(0, total, _CHUNK):
        m = np.arange(start, min(start + _CHUNK, total), dtype=np.uint32)
        sat = np.ones(len(m), dtype=bool)
        for pos, neg in masks:
            clause_sat = (m & np.uint32(pos)) != 0
            if neg:
                clause_sat |= (m & np.uint32(neg)) != np.uint32(neg)
            sat &= clause_sat
            if not sat.any():
                break
        count += int(np.count_nonzero(sat))
    return count


def enumerate_models(clauses: list[Clause], universe: list[Constant]) -> ModelCount:
    """Exhaustively check all interpretations of the grounded clause set.

    Bounds: function-free clauses, universe of at most 4 constants, at most
    24 distinct ground atoms; beyond them OracleTooLarge is raised.
    """
    if not universe:
        raise OracleTooLarge("the universe must contain at least one constant")
    if len(universe) > MAX_UNIVERSE:
        raise OracleTooLarge(
            "universe of %d constants exceeds the bound of %d"
            % (len(universe), MAX_UNIVERSE)
        )
    _require_function_free(clauses)
    ground = ground_clauses(clauses, universe)
    index = _atom_table(ground)
    masks = _clause_masks(ground, index)
    count = _count_models(masks, len(index))
    return ModelCount(count > 0, count, len(index))


# ---------------------------------------------------------------------------
# Direct formula evaluation (no clausal form involved)


def evaluate_formula(
    f: FolFormula,
    universe: list[Constant],
    true_atoms: set[Atom],
    env: dict[str, Constant] | None = None,
) -> bool:
    """Evaluate a function-free formula under one interpretation, with
    quantifiers ranging over the universe."""
    env = env or {}
    if isinstance(f, Atom):
        args = []
        for a in f.args:
            if isinstance(a, Variable):
                args.append(env[a.name])
            elif isinstance(a, FuncApp):
                raise OracleTooLarge("function symbols are not evaluable")
            else:
                args.append(a)
        return Atom(f.predicate, tuple(args)) in true_atoms
    if isinstance(f, Not):
        return not evaluate_formula(f.sub, universe, true_atoms, env)
    if isinstance(f, And):
        return evaluate_formula(f.left, universe, true_atoms, env) and evaluate_formula(
            f.right, universe, true_atoms, env
        )
    if isinstance(f, Or):
        return evaluate_formula(f.left, universe, true_atoms, env) or evaluate_formula(
            f.right, universe, true_atoms, env
        )
    if isinstance(f, Implies):
        return (not evaluate_formula(f.left, universe, true_atoms, env)) or (
            evaluate_formula(f.right, universe, true_atoms, env)
        )
    if isinstance(f, Equiv):
        return evaluate_formula(f.left, universe, true_atoms, env) == evaluate_formula(
            f.right, universe, true_atoms, env
        )
    if isinstance(f, Xor):
        return evaluate_formula(f.left, universe, true_atoms, env) != evaluate_formula(
            f.right, universe, true_atoms, env
        )
    if isinstance(f, AndList):
        return all(evaluate_formula(g, universe, true_atoms, env) for g in f.items)
    if isinstance(f, OrList):
        return any(evaluate_formula(g, universe, true_atoms, env) for g in f.items)
    if isinstance(f, Exists):
        return any(
            evaluate_formula(f.body, universe, true_atoms, {**env, f.var.name: c})
            for c in universe
        )
    if isinstance(f, Forall):
        return all(
            evaluate_formula(f.body, universe, true_atoms, {**env, f.var.name: c})
            for c in universe
        )
    raise TypeError("not a formula: %r" % (f,))


def formula_truth_vector(
    f: FolFormula, index: dict[Atom, int], interps: np.ndarray
) -> np.ndarray:
    """Truth of a ground formula across a vector of bitmask interpretations."""
    if isinstance(f, Atom):
        if f not in index:
            return np.zeros(len(interps), dtype=bool)
        return (interps & np.uint32(1 << index[f])) != 0
    if isinstance(f, Not):
        return ~formula_truth_vector(f.sub, index, interps)
    if isinstance(f, And):
        return formula_truth_vector(f.left, index, interps) & formula_truth_vector(
            f.right, index, interps
        )
    if isinstance(f, Or):
        return formula_truth_vector(f.left, index, interps) | formula_truth_vector(
            f.right, index, interps
        )
    if isinstance(f, Implies):
        return ~formula_truth_vector(f.left, index, interps) | formula_truth_vector(
            f.right, index, interps
        )
    if isinstance(f, Equiv):
        return formula_truth_vector(f.left, index, interps) == formula_truth_vector(
            f.right, index, interps
        )
    if isinstance(f, Xor):
        return formula_truth_vector(f.left, index, interps) != formula_truth_vector(
            f.right, index, interps
        )
    if isinstance(f, AndList):
        out = formula_truth_vector(f.items[0], index, interps)
        for g in f.items[1:]:
            out = out & formula_truth_vector(g, index, interps)
        return out
    if isinstance(f, OrList):
        out = formula_truth_vector(f.items[0], index, interps)
        for g in f.items[1:]:
            out = out | formula_truth_vector(g, index, interps)
        return out
    raise ValueError("formula must be ground and quantifier-free: %r" % (f,))


def entailment_by_enumeration(
    fact_clauses: list[Clause],
    query: FolFormula,
    universe: list[Constant],
) -> TruthValue:
    """Three-valued entailment decided purely by model enumeration; the
    query must be ground.  Raises InconsistentFacts when the fact clauses
    admit no model at all."""
    if free_variables(query):
        raise ValueError("the enumeration oracle needs a ground query")
    ground = ground_clauses(fact_clauses, universe)
    atoms = {lit.atom for clause in ground for lit in clause}

    def collect_query_atoms(f: FolFormula):
        from ..ir import formula_atoms

        for atom in formula_atoms(f):
            if any(isinstance(a, FuncApp) for a in atom.args):
                raise OracleTooLarge("function symbols are not evaluable")
            atoms.add(atom)

    collect_query_atoms(query)
    table = sorted(atoms, key=lambda a: a.text())
    if len(table) > MAX_GROUND_ATOMS:
        raise OracleTooLarge(
            "%d ground atoms exceed the enumeration bound of %d"
            % (len(table), MAX_GROUND_ATOMS)
        )
    index = {a: i for i, a in enumerate(table)}
    masks = _clause_masks(ground, index)

    facts_have_model = False
    counter_true = False  # a model of facts where query is false
    counter_false = False  # a model of facts where query is true
    total = 1 << len(table)
    for start in range(0, total, _CHUNK):
        m = np.arange(start, min(start + _CHUNK, total), dtype=np.uint32)
        sat = np.ones(len(m), dtype=bool)
        for pos, neg in masks:
            clause_sat = (m & np.uint32(pos)) != 0
            if neg:
                clause_sat |= (m & np.uint32(neg)) != np.uint32(neg)
            sat &= clause_sat
        if not sat.any():
            continue
        facts_have_model = True
        q = formula_truth_vector(query, index, m)
        counter_true = counter_true or bool((sat & ~q).any())
        counter_false = counter_false or bool((sat & q).any())
        if counter_true and counter_false:
            break
    if not facts_have_model:
        raise InconsistentFacts("the fact clauses admit no model")
    if not counter_true:
        return TruthValue.PROVED
    if not counter_false:
        return TruthValue.DISPROVED
    return TruthValue.UNKNOWN
