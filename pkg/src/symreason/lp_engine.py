"""Deductive reasoner over logic programs.

Forward chaining runs semi-naive to the least fixpoint (each iteration only
joins against facts derived in the previous one); queries get a three-valued
answer under the open-world reading, and backward chaining extracts a proof
tree for a ground goal.  No negation-as-failure: a missing fact is Unknown,
and negative conclusions arise only from explicitly derived False-polarity
facts.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import (
    InconsistentProgram,
    NonGroundQuery,
    ResourceExhausted,
    ResourceLimitWarning,
    raise_if_past_deadline,
)
from .ir import Atom, BoolLiteral, Term, TruthValue, Variable
from .syntax.lp import LpProgram, LpRule


@dataclass(frozen=True)
class LpLimits:
    max_derived_facts: int = 100_000
    max_iterations: int = 1_000
    deadline: float | None = None  # absolute time.monotonic() timestamp

    def __post_init__(self):
        if self.max_derived_facts <= 0 or self.max_iterations <= 0:
            raise ValueError("limits must be positive")


class FactSet:
    """Ground atoms with set semantics, indexed by predicate; iteration
    follows insertion order so traces are reproducible."""

    def __init__(self, atoms: Optional[Iterator[Atom]] = None):
        self._all: dict[Atom, None] = {}
        self._by_pred: dict[str, list[Atom]] = {}
        for a in atoms or ():
            self.add(a)

    def add(self, atom: Atom) -> bool:
        if atom in self._all:
            return False
        self._all[atom] = None
        self._by_pred.setdefault(atom.predicate, []).append(atom)
        return True

    def by_predicate(self, name: str) -> list[Atom]:
        return self._by_pred.get(name, [])

    def __contains__(self, atom: Atom) -> bool:
        return atom in self._all

    def __iter__(self) -> Iterator[Atom]:
        return iter(self._all)

    def __len__(self) -> int:
        return len(self._all)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FactSet):
            return NotImplemented
        return set(self._all) == set(other._all)


@dataclass(frozen=True)
class ProofTree:
    """Backward-chaining derivation: leaves are base facts, internal nodes
    instantiate `rule_used` with their children as the rule body."""

    root: Atom
    children: tuple["ProofTree", ...] = ()
    rule_used: LpRule | None = None

    def is_leaf(self) -> bool:
        return not self.children


Subst = dict[str, Term]


def match_atom(pattern: Atom, ground: Atom, subst: Subst) -> Subst | None:
    """One-way match of a rule atom against a ground fact; returns the
    extended substitution or None."""
    if pattern.predicate != ground.predicate or pattern.arity != ground.arity:
        return None
    out = subst
    copied = False
    for p, g in zip(pattern.args, ground.args):
        if isinstance(p, Variable):
            bound = out.get(p.name)
            if bound is None:
                if not copied:
                    out = dict(out)
                    copied = True
                out[p.name] = g
            elif bound != g:
                return None
        elif p != g:
            return None
    return out


def substitute_atom(atom: Atom, subst: Subst) -> Atom:
    args = tuple(
        subst.get(a.name, a) if isinstance(a, Variable) else a for a in atom.args
    )
    return Atom(atom.predicate, args)


def split_heads(rules: tuple[LpRule, ...]) -> list[tuple[tuple[Atom, ...], Atom, LpRule]]:
    """Conjunctive heads become one internal rule per head atom; semantics
    of the `F1 && ... >>> Fm && Fn` form are unchanged."""
    out = []
    for rule in rules:
        for head in rule.head:
            out.append((rule.body, head, rule))
    return out


def forward_chain(program: LpProgram, limits: LpLimits | None = None) -> FactSet:
    """Least fixpoint of rule application over the base facts.

    Raises ResourceExhausted when the configured limits trip; the result is
    independent of rule and fact order (as a set).
    """
    limits = limits or LpLimits()
    rules = split_heads(program.rules)
    facts = FactSet(f.atom for f in program.facts)
    delta = list(facts)
    iterations = 0
    while delta:
        iterations += 1
        if iterations > limits.max_iterations:
            raise ResourceExhausted(
                "forward chaining exceeded %d iterations" % limits.max_iterations
            )
        raise_if_past_deadline(limits.deadline, "forward chaining")
        delta_by_pred: dict[str, list[Atom]] = {}
        for a in delta:
            delta_by_pred.setdefault(a.predicate, []).append(a)
        new: list[Atom] = []
        new_seen: set[Atom] = set()
        for body, head, _ in rules:
            for delta_pos in range(len(body)):
                if body[delta_pos].predicate not in delta_by_pred:
                    continue
                for subst in _join(body, delta_pos, delta_by_pred, facts):
                    derived = substitute_atom(head, subst)
                    if derived in facts or derived in new_seen:
                        continue
                    new.append(derived)
                    new_seen.add(derived)
                    if len(facts) + len(new) > limits.max_derived_facts:
                        raise ResourceExhausted(
                            "forward chaining derived more than %d facts"
                            % limits.max_derived_facts
                        )
        for a in new:
            facts.add(a)
        delta = new
    return facts


def _join(
    body: tuple[Atom, ...],
    delta_pos: int,
    delta_by_pred: dict[str, list[Atom]],
    facts: FactSet,
) -> Iterator[Subst]:
    """All substitutions grounding the body with position `delta_pos` bound
    from the newly derived facts (the semi-naive join)."""

    def extend(idx: int, subst: Subst) -> Iterator[Subst]:
        if idx == len(body):
            yield subst
            return
        pattern = body[idx]
        if idx == delta_pos:
            pool = delta_by_pred.get(pattern.predicate, [])
        else:
            pool = facts.by_predicate(pattern.predicate)
        for ground in pool:
            extended = match_atom(pattern, ground, subst)
            if extended is not None:
                yield from extend(idx + 1, extended)

    yield from extend(0, {})


def _flip_polarity(query: Atom) -> Atom:
    last = query.args[-1]
    assert isinstance(last, BoolLiteral)
    return Atom(query.predicate, (*query.args[:-1], BoolLiteral(not last.value)))


def lp_query(program: LpProgram, limits: LpLimits | None = None) -> TruthValue:
    """Three-valued answer for the program's query.

    The query must be ground with a boolean final argument (the polarity
    convention, e.g. `Shy(Alex, False)`).  Proved when the query itself is
    derivable, Disproved when its boolean-flipped form is, Unknown otherwise;
    both derivable raises InconsistentProgram, and hitting a resource limit
    degrades to Unknown with a warning.
    """
    query = program.query
    if not query.is_ground():
        raise NonGroundQuery("query %s must be ground" % query.text())
    if not query.args or not isinstance(query.args[-1], BoolLiteral):
        raise NonGroundQuery(
            "query %s must end with a boolean polarity argument" % query.text()
        )
    flipped = _flip_polarity(query)
    try:
        facts = forward_chain(program, limits)
    except ResourceExhausted as exc:
        warnings.warn(str(exc), ResourceLimitWarning)
        return TruthValue.UNKNOWN
    positive = query in facts
    negative = flipped in facts
    if positive and negative:
        raise InconsistentProgram(
            "both %s and %s are derivable" % (query.text(), flipped.text())
        )
    if positive:
        return TruthValue.PROVED
    if negative:
        return TruthValue.DISPROVED
    return TruthValue.UNKNOWN


def backward_prove(
    program: LpProgram, goal: Atom, limits: LpLimits | None = None
) -> ProofTree | None:
    """Goal-directed SLD search for a ground goal.

    Returns a proof tree that validates against the program, or None when
    the goal is not provable.  Goals already on the current path fail that
    path (loop prevention); proved subgoals are memoized.
    """
    limits = limits or LpLimits()
    if not goal.is_ground():
        raise NonGroundQuery("goal %s must be ground" % goal.text())
    rules = split_heads(program.rules)
    base = {f.atom for f in program.facts}
    universe = _ground_terms(program)
    memo: dict[Atom, ProofTree] = {}
    expansions = 0

    def prove(g: Atom, path: frozenset[Atom]) -> ProofTree | None:
        nonlocal expansions
        if g in memo:
            return memo[g]
        if g in base:
            tree = ProofTree(g)
            memo[g] = tree
            return tree
        if g in path:
            return None
        expansions += 1
        if expansions > limits.max_derived_facts:
            raise ResourceExhausted(
                "backward chaining expanded more than %d goals"
                % limits.max_derived_facts
            )
        raise_if_past_deadline(limits.deadline, "backward chaining")
        deeper = path | {g}
        for body, head, rule in rules:
            subst = match_atom(head, g, {})
            if subst is None:
                continue
            children = prove_body(body, 0, subst, deeper)
            if children is not None:
                tree = ProofTree(g, tuple(children), rule)
                memo[g] = tree
                return tree
        return None

    def prove_body(
        body: tuple[Atom, ...], idx: int, subst: Subst, path: frozenset[Atom]
    ) -> list[ProofTree] | None:
        if idx == len(body):
            return []
        pattern = substitute_atom(body[idx], subst)
        unbound = sorted(
            {v.name for v in pattern.variables()},
        )
        if not unbound:
            sub = prove(pattern, path)
            if sub is None:
                return None
            rest = prove_body(body, idx + 1, subst, path)
            if rest is None:
                return None
            return [sub] + rest
        for combo in itertools.product(universe, repeat=len(unbound)):
            extended = dict(subst)
            extended.update(dict(zip(unbound, combo)))
            ground = substitute_atom(pattern, extended)
            sub = prove(ground, path)
            if sub is None:
                continue
            rest = prove_body(body, idx + 1, extended, path)
            if rest is not None:
                return [sub] + rest
        return None

    return prove(goal, frozenset())


def _ground_terms(program: LpProgram) -> list[Term]:
    """Every ground argument term in the program, in first-appearance order;
    range restriction means derived facts only ever mention these."""
    out: dict[Term, None] = {}
    for fact in program.facts:
        for arg in fact.atom.args:
            out.setdefault(arg, None)
    for rule in program.rules:
        for atom in rule.body + rule.head:
            for arg in atom.args:
                if not isinstance(arg, Variable):
                    out.setdefault(arg, None)
    return list(out)


def proof_is_valid(tree: ProofTree, program: LpProgram) -> bool:
    """Check a proof tree against its program: leaves are base facts and
    every internal node instantiates its rule's body under one substitution."""
    base = {f.atom for f in program.facts}
    if tree.is_leaf():
        return tree.rule_used is None and tree.root in base
    rule = tree.rule_used
    if rule is None:
        return False
    for head in rule.head:
        subst = match_atom(head, tree.root, {})
        if subst is None:
            continue
        if len(rule.body) != len(tree.children):
            continue
        current: Subst | None = subst
        for pattern, child in zip(rule.body, tree.children):
            current = match_atom(pattern, child.root, current)
            if current is None:
                break
        if current is not None and all(
            proof_is_valid(child, program) for child in tree.children
        ):
            return True
    return False
