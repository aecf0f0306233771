"""Resolution-based three-valued entailment.

Saturation is an otter-style given-clause loop: clauses are selected by
ascending (literal count, term depth, age), every selected clause is
factored, and new clauses are kept only if no kept clause subsumes them
(forward subsumption).  Proved means `facts + not(query)` refutes; Disproved
means `facts + query` does; any limit breach degrades to Unknown with a
warning.  Every derived clause carries enough bookkeeping to replay its
inference, and the whole run is deterministic: same inputs, same verdict,
same step count.
"""

from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass, field

from ..errors import (
    ClauseExplosion,
    InconsistentFacts,
    ResourceLimitWarning,
    raise_if_past_deadline,
)
from ..ir import Clause, FolFormula, Literal, Not, TruthValue, formula_constants
from .cnf import clausify_all
from .unify import (
    Subst,
    apply_subst_literal,
    apply_subst_term,
    canonicalize_clause,
    match_atom,
    rename_clause,
    unify_atoms,
)


@dataclass(frozen=True)
class ProverLimits:
    max_clauses: int = 20_000
    max_resolution_steps: int = 200_000
    max_term_depth: int = 6
    deadline: float | None = None  # absolute time.monotonic() timestamp

    def __post_init__(self):
        if min(self.max_clauses, self.max_resolution_steps, self.max_term_depth) <= 0:
            raise ValueError("limits must be positive")


@dataclass(frozen=True)
class DerivationStep:
    """One clause in a saturation run; `parents` are clause ids and
    `unifier` is the rendered substitution used by the inference."""

    clause_id: int
    kind: str  # "input" | "resolve" | "factor"
    parents: tuple[int, ...]
    unifier: tuple[tuple[str, str], ...]
    clause: Clause

    def render(self) -> str:
        sigma = ", ".join("%s=%s" % (v, t) for v, t in self.unifier)
        return "[%d] %s(%s){%s}: %s" % (
            self.clause_id,
            self.kind,
            ",".join(str(p) for p in self.parents),
            sigma,
            self.clause.text(),
        )


@dataclass
class SaturationResult:
    refuted: bool
    complete: bool  # True only if saturation finished with nothing discarded
    steps: int
    derivation: list[DerivationStep] = field(default_factory=list)
    empty_clause_id: int | None = None

    def derivation_text(self) -> str:
        return "\n".join(step.render() for step in self.derivation)


def _render_subst(subst: Subst) -> tuple[tuple[str, str], ...]:
    from ..ir import term_text

    return tuple(
        sorted(
            (name, term_text(apply_subst_term(t, subst)))
            for name, t in subst.items()
        )
    )


def resolvents(given: Clause, other: Clause) -> list[tuple[Clause, Subst]]:
    """All binary resolvents of the pair; `other` is renamed apart first."""
    other = rename_clause(other, "r.")
    out: list[tuple[Clause, Subst]] = []
    for lit_a in given.sorted_literals():
        for lit_b in other.sorted_literals():
            if lit_a.sign == lit_b.sign:
                continue
            subst = unify_atoms(lit_a.atom, lit_b.atom)
            if subst is None:
                continue
            rest = [
                apply_subst_literal(l, subst)
                for l in given.sorted_literals()
                if l != lit_a
            ] + [
                apply_subst_literal(l, subst)
                for l in other.sorted_literals()
                if l != lit_b
            ]
            out.append((Clause.of(rest), subst))
    return out


def factors(clause: Clause) -> list[tuple[Clause, Subst]]:
    """All factors: merge two unifiable same-sign literals."""
    lits = clause.sorted_literals()
    out: list[tuple[Clause, Subst]] = []
    for i in range(len(lits)):
        for j in range(i + 1, len(lits)):
            if lits[i].sign != lits[j].sign:
                continue
            subst = unify_atoms(lits[i].atom, lits[j].atom)
            if subst is None:
                continue
            out.append(
                (Clause.of(apply_subst_literal(l, subst) for l in lits), subst)
            )
    return out


def subsumes(general: Clause, specific: Clause) -> bool:
    """θ-subsumption: some one-way match sends every literal of `general`
    into `specific`."""
    if len(general.literals) > len(specific.literals):
        return False
    g = general.sorted_literals()
    s = specific.sorted_literals()

    def go(i: int, subst: Subst) -> bool:
        if i == len(g):
            return True
        lit = g[i]
        for cand in s:
            if cand.sign != lit.sign:
                continue
            extended = match_atom(lit.atom, cand.atom, subst)
            if extended is not None and go(i + 1, extended):
                return True
        return False

    return go(0, {})


def saturate(clauses: list[Clause], limits: ProverLimits) -> SaturationResult:
    """Run the given-clause loop to refutation, saturation, or a limit."""
    result = SaturationResult(refuted=False, complete=True, steps=0)
    by_id: dict[int, Clause] = {}
    seen: set[frozenset[Literal]] = set()
    usable: list[tuple[int, int, int]] = []  # (literal count, depth, id)
    next_id = 0

    def admit(clause: Clause, kind: str, parents: tuple[int, ...], subst: Subst) -> bool:
        """Returns True when the empty clause was derived."""
        nonlocal next_id
        clause = canonicalize_clause(clause)
        if clause.is_tautology() or clause.literals in seen:
            return False
        if clause.depth() > limits.max_term_depth:
            result.complete = False
            return False
        if any(subsumes(by_id[k], clause) for k in sorted(by_id)):
            return False
        cid = next_id
        next_id += 1
        seen.add(clause.literals)
        by_id[cid] = clause
        result.derivation.append(
            DerivationStep(cid, kind, parents, _render_subst(subst), clause)
        )
        if clause.is_empty():
            result.refuted = True
            result.empty_clause_id = cid
            return True
        heapq.heappush(usable, (len(clause.literals), clause.depth(), cid))
        return False

    for clause in clauses:
        if admit(clause, "input", (), {}):
            return result

    processed: list[int] = []
    while usable:
        raise_if_past_deadline(limits.deadline, "resolution")
        if next_id > limits.max_clauses:
            result.complete = False
            break
        _, _, given_id = heapq.heappop(usable)
        given = by_id[given_id]
        processed.append(given_id)

        inferences: list[tuple[Clause, str, tuple[int, ...], Subst]] = []
        for factored, subst in factors(given):
            inferences.append((factored, "factor", (given_id,), subst))
        for other_id in processed:
            for resolved, subst in resolvents(given, by_id[other_id]):
                inferences.append(
                    (resolved, "resolve", (given_id, other_id), subst)
                )

        for clause, kind, parents, subst in inferences:
            result.steps += 1
            if result.steps > limits.max_resolution_steps:
                result.complete = False
                return result
            if admit(clause, kind, parents, subst):
                return result
    return result


@dataclass
class EntailmentReport:
    verdict: TruthValue
    negated_side: SaturationResult
    affirmed_side: SaturationResult | None
    warnings: list[str] = field(default_factory=list)


def entailment_report(
    facts: list[FolFormula],
    query: FolFormula,
    limits: ProverLimits | None = None,
) -> EntailmentReport:
    """Full two-sided saturation with logs and step counts.

    Raises InconsistentFacts when both sides refute (the facts alone are
    contradictory); ClauseExplosion during CNF conversion degrades to
    Unknown with a warning.
    """
    limits = limits or ProverLimits()
    reserved = frozenset(
        set().union(*(formula_constants(f) for f in [*facts, query]))
    )
    notes: list[str] = []

    def side(goal: FolFormula) -> SaturationResult | None:
        try:
            clauses = clausify_all(
                [*facts, goal], reserved=reserved, max_clauses=limits.max_clauses
            )
        except ClauseExplosion as exc:
            notes.append(str(exc))
            return None
        return saturate(clauses, limits)

    negated = side(Not(query))
    if negated is None:
        report = EntailmentReport(
            TruthValue.UNKNOWN,
            SaturationResult(refuted=False, complete=False, steps=0),
            None,
            notes,
        )
        _warn_all(notes)
        return report

    affirmed = side(query)
    if negated.refuted:
        if affirmed is not None and affirmed.refuted:
            raise InconsistentFacts(
                "the fact set alone is contradictory: both the query and "
                "its negation lead to the empty clause"
            )
        report = EntailmentReport(TruthValue.PROVED, negated, affirmed, notes)
        _warn_all(notes)
        return report
    if affirmed is not None and affirmed.refuted:
        report = EntailmentReport(TruthValue.DISPROVED, negated, affirmed, notes)
        _warn_all(notes)
        return report
    if not negated.complete or affirmed is None or not affirmed.complete:
        notes.append("resolution hit a resource limit; verdict degraded to Unknown")
    report = EntailmentReport(TruthValue.UNKNOWN, negated, affirmed, notes)
    _warn_all(notes)
    return report


def _warn_all(notes: list[str]):
    for note in notes:
        warnings.warn(note, ResourceLimitWarning)


def resolve_entailment(
    facts: list[FolFormula],
    query: FolFormula,
    limits: ProverLimits | None = None,
) -> TruthValue:
    """Three-valued entailment of `query` from `facts` (all closed)."""
    return entailment_report(facts, query, limits).verdict
