"""Finite-domain constraint models: `Domain / Variables / Constraints / Query`.

Domain lines annotate what values mean (`1: oldest`), variable lines declare
domains (`blue_book [IN] [1,2,3,4,5]`), constraints compare variables and
integers or assert `AllDifferentConstraint([...])`, and the query block lists
lettered candidate statements (`A) station_wagon == 2`).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Union

from ..errors import ParseError, ParseErrorKind, ParseFailure, ParserWarning
from ..ir import SourceSpan
from .scanner import (
    ContentLine,
    LineScanner,
    split_gloss,
    split_sections,
)

SECTION_HEADERS = ["Domain", "Variables", "Constraints", "Query"]
DOMAIN_MARKER = "[IN]"
CMP_OPS = ("==", "!=", "<=", ">=", "<", ">")
ALL_DIFFERENT = "AllDifferentConstraint"


@dataclass(frozen=True)
class VarTerm:
    name: str


@dataclass(frozen=True)
class IntTerm:
    value: int


@dataclass(frozen=True)
class SumTerm:
    """`var + offset` (or `var - offset`, stored with a negative offset)."""

    var: str
    offset: int


CspOperand = Union[VarTerm, IntTerm, SumTerm]


@dataclass(frozen=True)
class Cmp:
    lhs: CspOperand
    op: str
    rhs: CspOperand

    def __post_init__(self):
        if self.op not in CMP_OPS:
            raise ValueError("unknown comparison operator %r" % self.op)


@dataclass(frozen=True)
class AllDifferent:
    vars: tuple[str, ...]

    def __post_init__(self):
        if len(self.vars) < 2:
            raise ValueError("AllDifferent needs at least 2 variables")


ConstraintExpr = Union[Cmp, AllDifferent]


def expr_variables(expr: ConstraintExpr) -> set[str]:
    if isinstance(expr, AllDifferent):
        return set(expr.vars)
    out: set[str] = set()
    for side in (expr.lhs, expr.rhs):
        if isinstance(side, VarTerm):
            out.add(side.name)
        elif isinstance(side, SumTerm):
            out.add(side.var)
    return out


@dataclass(frozen=True)
class CspConstraint:
    expr: ConstraintExpr
    gloss: str | None = None


@dataclass(frozen=True)
class CspOption:
    letter: str
    expr: ConstraintExpr
    gloss: str | None = None


@dataclass(frozen=True)
class CspModel:
    legend: tuple[tuple[int, str], ...]
    variables: tuple[str, ...]
    domains: dict[str, tuple[int, ...]] = field(default_factory=dict)
    constraints: tuple[CspConstraint, ...] = ()
    options: tuple[CspOption, ...] = ()

    def option_exprs(self) -> dict[str, ConstraintExpr]:
        return {o.letter: o.expr for o in self.options}

    def legend_map(self) -> dict[int, str]:
        return dict(self.legend)


def _scan_operand(
    sc: LineScanner, allow_sum: bool, errors: list[ParseError]
) -> tuple[CspOperand, SourceSpan] | None:
    sc.skip_ws()
    start = sc.pos
    got_int = sc.take_int()
    if got_int is not None:
        value, span = got_int
        return IntTerm(value), span
    got = sc.take_ident()
    if got is None:
        errors.append(sc.syntax_error("a variable name or integer"))
        return None
    name, span = got
    sc.skip_ws()
    if allow_sum and sc.peek() in ("+", "-"):
        sign = 1 if sc.peek() == "+" else -1
        sc.pos += 1
        got_int = sc.take_int()
        if got_int is None:
            errors.append(sc.syntax_error("an integer offset after '+'/'-'"))
            return None
        offset, _ = got_int
        return SumTerm(name, sign * offset), sc.span(start, sc.pos - start)
    return VarTerm(name), span


def _scan_constraint(
    line: ContentLine, errors: list[ParseError]
) -> tuple[ConstraintExpr, list[tuple[str, SourceSpan]]] | None:
    """Returns the expression plus each variable reference with its span."""
    code, _ = split_gloss(line)
    sc = LineScanner(code)
    sc.skip_ws()
    refs: list[tuple[str, SourceSpan]] = []

    if sc.text.startswith(ALL_DIFFERENT, sc.pos):
        sc.pos += len(ALL_DIFFERENT)
        if not sc.accept("("):
            errors.append(sc.syntax_error("'(' after %s" % ALL_DIFFERENT))
            return None
        bracketed = sc.accept("[")
        names: list[str] = []
        while True:
            got = sc.take_ident()
            if got is None:
                errors.append(sc.syntax_error("a variable name"))
                return None
            names.append(got[0])
            refs.append(got)
            if sc.accept(","):
                continue
            break
        if bracketed and not sc.accept("]"):
            errors.append(sc.syntax_error("']'"))
            return None
        if not sc.accept(")"):
            errors.append(sc.syntax_error("')'"))
            return None
        if not _end(sc, errors):
            return None
        if len(names) < 2:
            errors.append(
                sc.error(
                    "%s needs at least 2 variables" % ALL_DIFFERENT,
                    span=SourceSpan(line.number, line.column, len(line.text)),
                )
            )
            return None
        return AllDifferent(tuple(names)), refs

    lhs = _scan_operand(sc, allow_sum=False, errors=errors)
    if lhs is None:
        return None
    if isinstance(lhs[0], VarTerm):
        refs.append((lhs[0].name, lhs[1]))
    sc.skip_ws()
    op = next((o for o in CMP_OPS if sc.text.startswith(o, sc.pos)), None)
    if op is None:
        errors.append(sc.syntax_error("a comparison (==, !=, <, >, <=, >=)"))
        return None
    sc.pos += len(op)
    rhs = _scan_operand(sc, allow_sum=True, errors=errors)
    if rhs is None:
        return None
    if isinstance(rhs[0], VarTerm):
        refs.append((rhs[0].name, rhs[1]))
    elif isinstance(rhs[0], SumTerm):
        refs.append((rhs[0].var, rhs[1]))
    if not _end(sc, errors):
        return None
    return Cmp(lhs[0], op, rhs[0]), refs


def _end(sc: LineScanner, errors: list[ParseError]) -> bool:
    if not sc.at_end():
        errors.append(sc.syntax_error("end of line"))
        return False
    return True


def parse_csp(text: str) -> CspModel:
    """Parse a constraint model; raises ParseFailure with all diagnostics."""
    errors: list[ParseError] = []
    sections, missing = split_sections(text, SECTION_HEADERS, errors)

    legend: list[tuple[int, str]] = []
    for line in sections["Domain"]:
        sc = LineScanner(line)
        got_int = sc.take_int()
        if got_int is None or not sc.accept(":"):
            errors.append(sc.syntax_error("a legend line like '1: oldest'"))
            continue
        legend.append((got_int[0], sc.rest().strip()))

    variables: list[str] = []
    domains: dict[str, tuple[int, ...]] = {}
    for line in sections["Variables"]:
        sc = LineScanner(line)
        got = sc.take_ident()
        if got is None:
            errors.append(sc.syntax_error("a variable name"))
            continue
        name, name_span = got
        if not sc.accept(DOMAIN_MARKER):
            errors.append(sc.syntax_error("'%s'" % DOMAIN_MARKER))
            continue
        if not sc.accept("["):
            errors.append(sc.syntax_error("'[' opening the domain values"))
            continue
        values: list[int] = []
        bad = False
        if not sc.accept("]"):
            while True:
                got_int = sc.take_int()
                if got_int is None:
                    errors.append(sc.syntax_error("an integer domain value"))
                    bad = True
                    break
                values.append(got_int[0])
                if sc.accept(","):
                    continue
                if sc.accept("]"):
                    break
                errors.append(sc.syntax_error("',' or ']' in the domain list"))
                bad = True
                break
        if bad or not _end(sc, errors):
            continue
        if not values:
            errors.append(
                sc.error(
                    "variable '%s' has an empty domain" % name, span=name_span
                )
            )
            continue
        if name in domains:
            errors.append(
                sc.error("variable '%s' declared twice" % name, span=name_span)
            )
            continue
        variables.append(name)
        domains[name] = tuple(dict.fromkeys(values))
    if not variables and "Variables" not in missing and not sections["Variables"]:
        errors.append(
            ParseError(
                SourceSpan(1, 1, 0),
                ParseErrorKind.EMPTY_SECTION,
                "Variables section has no content",
            )
        )

    def check_declared(refs: list[tuple[str, SourceSpan]]) -> bool:
        ok = True
        for name, span in refs:
            if name not in domains:
                errors.append(
                    ParseError(
                        span,
                        ParseErrorKind.UNDECLARED_VARIABLE,
                        "variable '%s' is not declared in Variables" % name,
                    )
                )
                ok = False
        return ok

    constraints: list[CspConstraint] = []
    for line in sections["Constraints"]:
        _, gloss = split_gloss(line)
        scanned = _scan_constraint(line, errors)
        if scanned is None:
            continue
        expr, refs = scanned
        if check_declared(refs):
            constraints.append(CspConstraint(expr, gloss))

    options: list[CspOption] = []
    seen_letters: set[str] = set()
    query_lines = sections["Query"]
    if not query_lines:
        if "Query" not in missing:
            errors.append(
                ParseError(
                    SourceSpan(1, 1, 0),
                    ParseErrorKind.EMPTY_SECTION,
                    "Query section has no content",
                )
            )
    for line in query_lines:
        sc = LineScanner(line)
        sc.skip_ws()
        letter_start = sc.pos
        got = sc.take_ident()
        if got is None or len(got[0]) != 1 or not got[0].isupper() or not sc.accept(")"):
            probe_sc = LineScanner(line)
            if line is query_lines[-1]:
                warnings.warn(
                    "ignoring trailing prose after the options: %r"
                    % line.text[:40],
                    ParserWarning,
                )
                continue
            errors.append(
                probe_sc.syntax_error("an option like 'A) station_wagon == 2'")
            )
            continue
        letter = got[0]
        if letter in seen_letters:
            errors.append(
                sc.error("option letter '%s' appears twice" % letter, span=got[1])
            )
            continue
        rest = ContentLine(
            line.number, line.column + (sc.pos - 0), line.text[sc.pos:]
        )
        _, gloss = split_gloss(rest)
        scanned = _scan_constraint(rest, errors)
        if scanned is None:
            continue
        expr, refs = scanned
        if check_declared(refs):
            seen_letters.add(letter)
            options.append(CspOption(letter, expr, gloss))

    if errors:
        raise ParseFailure(errors)
    return CspModel(
        tuple(legend), tuple(variables), domains, tuple(constraints), tuple(options)
    )


# ---------------------------------------------------------------------------
# Printing


def print_expr(expr: ConstraintExpr) -> str:
    if isinstance(expr, AllDifferent):
        return "%s([%s])" % (ALL_DIFFERENT, ", ".join(expr.vars))
    parts = []
    for side in (expr.lhs, expr.rhs):
        if isinstance(side, VarTerm):
            parts.append(side.name)
        elif isinstance(side, IntTerm):
            parts.append(str(side.value))
        else:
            sign = "+" if side.offset >= 0 else "-"
            parts.append("%s %s %d" % (side.var, sign, abs(side.offset)))
    return "%s %s %s" % (parts[0], expr.op, parts[1])


def _with_gloss(code: str, gloss: str | None) -> str:
    if gloss is None:
        return code
    return "%s ::: %s" % (code, gloss) if gloss else code + " :::"


def print_csp(model: CspModel) -> str:
    """Canonical text form; re-parses to an equal CspModel."""
    lines = ["Domain:"]
    for value, meaning in model.legend:
        lines.append("%d: %s" % (value, meaning))
    lines.append("")
    lines.append("Variables:")
    for name in model.variables:
        lines.append(
            "%s [IN] [%s]" % (name, ", ".join(str(v) for v in model.domains[name]))
        )
    lines.append("")
    lines.append("Constraints:")
    for c in model.constraints:
        lines.append(_with_gloss(print_expr(c.expr), c.gloss))
    lines.append("")
    lines.append("Query:")
    for o in model.options:
        lines.append(_with_gloss("%s) %s" % (o.letter, print_expr(o.expr)), o.gloss))
    return "\n".join(lines) + "\n"
