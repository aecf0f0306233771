"""Finite-domain constraint solving: AC-3 propagation, backtracking
enumeration, and three-valued option evaluation.

Search is deterministic: MRV variable selection with declaration-order ties,
ascending value order, forward checking over binary decompositions, and a
native AllDifferent check at assignment time.  An option is Proved when it
holds in every solution, Disproved when it holds in none, Unknown otherwise.
"""

from __future__ import annotations

import operator
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .errors import (
    SolutionCapExceeded,
    Unsatisfiable,
    UnsatisfiableModel,
    raise_if_past_deadline,
)
from .ir import TruthValue
from .syntax.csp import (
    AllDifferent,
    Cmp,
    ConstraintExpr,
    CspModel,
    CspOperand,
    IntTerm,
    SumTerm,
    VarTerm,
    expr_variables,
)

Assignment = dict[str, int]

_OPS: dict[str, Callable[[int, int], bool]] = {
    "==": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    ">": operator.gt,
    "<=": operator.le,
    ">=": operator.ge,
}


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    backtracks: int = 0
    solutions_found: int = 0


def operand_value(operand: CspOperand, assignment: Assignment) -> int:
    if isinstance(operand, IntTerm):
        return operand.value
    if isinstance(operand, VarTerm):
        return assignment[operand.name]
    return assignment[operand.var] + operand.offset


def holds(expr: ConstraintExpr, assignment: Assignment) -> bool:
    """Evaluate a constraint on an assignment covering its variables."""
    if isinstance(expr, AllDifferent):
        values = [assignment[v] for v in expr.vars]
        return len(set(values)) == len(values)
    return _OPS[expr.op](
        operand_value(expr.lhs, assignment), operand_value(expr.rhs, assignment)
    )


_BinaryCheck = tuple[str, str, Callable[[int, int], bool]]


def _decompose(model: CspModel) -> tuple[list[_BinaryCheck], list[ConstraintExpr]]:
    """Binary checks for propagation/forward checking (AllDifferent becomes
    pairwise !=) plus constant constraints to verify up front.  Unary
    constraints come back as single-variable checks."""
    binaries: list[_BinaryCheck] = []
    constant: list[ConstraintExpr] = []
    for c in model.constraints:
        expr = c.expr
        if isinstance(expr, AllDifferent):
            for i in range(len(expr.vars)):
                for j in range(i + 1, len(expr.vars)):
                    binaries.append((expr.vars[i], expr.vars[j], operator.ne))
            continue
        names = sorted(expr_variables(expr))
        if not names:
            constant.append(expr)
        elif len(names) == 1:
            name = names[0]
            binaries.append(
                (name, name, _unary_as_binary(expr, name))
            )
        else:
            u, v = _cmp_var_order(expr)
            binaries.append((u, v, _cmp_check(expr, u, v)))
    return binaries, constant


def _unary_as_binary(expr: Cmp, name: str) -> Callable[[int, int], bool]:
    return lambda a, _b: holds(expr, {name: a})


def _cmp_var_order(expr: Cmp) -> tuple[str, str]:
    lhs = expr.lhs.name if isinstance(expr.lhs, VarTerm) else None
    if isinstance(expr.rhs, VarTerm):
        rhs = expr.rhs.name
    elif isinstance(expr.rhs, SumTerm):
        rhs = expr.rhs.var
    else:
        rhs = None
    assert lhs is not None and rhs is not None
    return lhs, rhs


def _cmp_check(expr: Cmp, u: str, v: str) -> Callable[[int, int], bool]:
    return lambda a, b: holds(expr, {u: a, v: b})


def propagate(model: CspModel) -> dict[str, tuple[int, ...]]:
    """AC-3 to fixpoint over the binary decomposition; every removed value
    had no support.  Raises Unsatisfiable when a domain empties."""
    binaries, constant = _decompose(model)
    for expr in constant:
        if not holds(expr, {}):
            raise Unsatisfiable("constraint %s is false" % _expr_text(expr))

    domains: dict[str, list[int]] = {
        name: sorted(set(model.domains[name])) for name in model.variables
    }

    # Node consistency for unary checks (u == v entries), then drop them.
    arcs: list[tuple[str, str, Callable[[int, int], bool]]] = []
    for u, v, check in binaries:
        if u == v:
            domains[u] = [a for a in domains[u] if check(a, a)]
            if not domains[u]:
                raise Unsatisfiable(
                    "the domain of '%s' became empty during propagation" % u
                )
        else:
            arcs.append((u, v, check))
            arcs.append((v, u, lambda b, a, _c=check: _c(a, b)))

    queue = deque(arcs)
    queued = {id(arc) for arc in arcs}
    while queue:
        arc = queue.popleft()
        queued.discard(id(arc))
        u, v, check = arc
        supported = [
            a for a in domains[u] if any(check(a, b) for b in domains[v])
        ]
        if len(supported) == len(domains[u]):
            continue
        domains[u] = supported
        if not supported:
            raise Unsatisfiable(
                "the domain of '%s' became empty during propagation" % u
            )
        for watcher in arcs:
            if watcher[1] == u and id(watcher) not in queued:
                queue.append(watcher)
                queued.add(id(watcher))
    return {name: tuple(values) for name, values in domains.items()}


def _expr_text(expr: ConstraintExpr) -> str:
    from .syntax.csp import print_expr

    return print_expr(expr)


def solve_all(
    model: CspModel,
    max_solutions: int = 10_000,
    deadline: float | None = None,
) -> tuple[list[Assignment], SearchStats]:
    """Enumerate every solution (deterministic order).

    Raises SolutionCapExceeded if more than `max_solutions` exist.
    """
    stats = SearchStats()
    try:
        domains = {k: list(v) for k, v in propagate(model).items()}
    except Unsatisfiable:
        return [], stats

    binaries, _ = _decompose(model)
    by_var: dict[str, list[tuple[str, Callable[[int, int], bool], bool]]] = {
        name: [] for name in model.variables
    }
    # For assigned u and neighbor w: keep (w, check oriented as (u, w)).
    for u, v, check in binaries:
        if u == v:
            continue
        by_var[u].append((v, check, False))
        by_var[v].append((u, check, True))
    alldiffs = [
        c.expr for c in model.constraints if isinstance(c.expr, AllDifferent)
    ]

    order_index = {name: i for i, name in enumerate(model.variables)}
    solutions: list[Assignment] = []
    assignment: Assignment = {}

    def pick_unassigned() -> str | None:
        best: str | None = None
        for name in model.variables:
            if name in assignment:
                continue
            if best is None or (
                (len(domains[name]), order_index[name])
                < (len(domains[best]), order_index[best])
            ):
                best = name
        return best

    def search():
        raise_if_past_deadline(deadline, "constraint search")
        var = pick_unassigned()
        if var is None:
            stats.solutions_found += 1
            if stats.solutions_found > max_solutions:
                raise SolutionCapExceeded(
                    "more than %d solutions; enumeration incomplete"
                    % max_solutions
                )
            solutions.append(dict(assignment))
            return
        for value in list(domains[var]):
            stats.nodes_expanded += 1
            assignment[var] = value
            if not _consistent_here(var):
                stats.backtracks += 1
                del assignment[var]
                continue
            saved: dict[str, list[int]] = {}
            if _forward_check(var, value, saved):
                search()
            else:
                stats.backtracks += 1
            domains.update(saved)
            del assignment[var]

    def _consistent_here(var: str) -> bool:
        # Binary constraints against already-assigned neighbors plus the
        # native AllDifferent check over assigned members.
        for other, check, flipped in by_var[var]:
            if other not in assignment:
                continue
            a, b = assignment[var], assignment[other]
            ok = check(b, a) if flipped else check(a, b)
            if not ok:
                return False
        for expr in alldiffs:
            if var in expr.vars:
                values = [assignment[v] for v in expr.vars if v in assignment]
                if len(set(values)) != len(values):
                    return False
        return True

    def _forward_check(var: str, value: int, saved: dict[str, list[int]]) -> bool:
        for other, check, flipped in by_var[var]:
            if other in assignment:
                continue
            keep = [
                b
                for b in domains[other]
                if (check(b, value) if flipped else check(value, b))
            ]
            if len(keep) != len(domains[other]):
                saved.setdefault(other, domains[other])
                domains[other] = keep
            if not keep:
                return False
        return True

    search()
    return solutions, stats


def option_truth(solutions: list[Assignment], expr: ConstraintExpr) -> TruthValue:
    """Quantify an option over an already-enumerated solution set."""
    hits = sum(1 for s in solutions if holds(expr, s))
    if hits == len(solutions):
        return TruthValue.PROVED
    if hits == 0:
        return TruthValue.DISPROVED
    return TruthValue.UNKNOWN


def evaluate_option(
    model: CspModel,
    opt: ConstraintExpr,
    max_solutions: int = 10_000,
    deadline: float | None = None,
) -> TruthValue:
    """Proved/Disproved/Unknown for one option; a model with no solutions is
    an UnsatisfiableModel error (a sign of a broken formulation, surfaced to
    the self-refiner)."""
    solutions, _ = solve_all(model, max_solutions=max_solutions, deadline=deadline)
    if not solutions:
        raise UnsatisfiableModel("the constraint model has no solutions")
    return option_truth(solutions, opt)
