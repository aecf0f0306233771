"""First-order problems in textual constructor notation.

A problem is a `Facts:` section and a `Query:` section, one formula per
line, written with the constructors Atom/Not/And/AndList/Or/OrList/Implies/
Equiv/Xor/Exists/Forall.  Names may be quoted with either quote style
(`Atom('P', $x)`); every formula must be closed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from ..errors import ParseError, ParseErrorKind, ParseFailure, ParserWarning
from ..ir import (
    And,
    AndList,
    Atom,
    Equiv,
    Exists,
    FolFormula,
    Forall,
    Implies,
    Not,
    Or,
    OrList,
    SourceSpan,
    Variable,
    Xor,
    formula_atoms,
    free_variables,
)
from .scanner import (
    ContentLine,
    LineScanner,
    print_term,
    scan_term,
    split_gloss,
    split_sections,
)

SECTION_HEADERS = ["Facts", "Query"]

_MAX_NESTING = 200


@dataclass(frozen=True)
class FolProblem:
    facts: tuple[FolFormula, ...]
    query: FolFormula
    fact_glosses: tuple[str | None, ...] = ()
    query_gloss: str | None = None

    def __post_init__(self):
        if len(self.fact_glosses) != len(self.facts):
            object.__setattr__(
                self, "fact_glosses", (None,) * len(self.facts)
            )


class _FormulaScanner:
    """Recursive-descent reader for one formula line."""

    BINARY = {"And": And, "Or": Or, "Implies": Implies, "Equiv": Equiv, "Xor": Xor}
    LISTS = {"AndList": AndList, "OrList": OrList}
    QUANT = {"Exists": Exists, "Forall": Forall}

    def __init__(self, sc: LineScanner):
        self.sc = sc
        self.var_spans: dict[str, SourceSpan] = {}

    def formula(self, depth: int = 0) -> FolFormula | ParseError:
        sc = self.sc
        if depth > _MAX_NESTING:
            return sc.error("formula nesting exceeds %d levels" % _MAX_NESTING)
        got = sc.take_ident()
        if got is None:
            return sc.syntax_error(
                "a connective (Atom, Not, And, AndList, Or, OrList, "
                "Implies, Equiv, Xor, Exists, Forall)"
            )
        name, span = got
        if not sc.accept("("):
            return sc.syntax_error("'(' after '%s'" % name)
        if name == "Atom":
            return self._atom()
        if name == "Not":
            sub = self.formula(depth + 1)
            if isinstance(sub, ParseError):
                return sub
            return self._close(Not(sub))
        if name in self.BINARY:
            ctor = self.BINARY[name]
            left = self.formula(depth + 1)
            if isinstance(left, ParseError):
                return left
            if not sc.accept(","):
                return sc.syntax_error("',' between the arguments of %s" % name)
            right = self.formula(depth + 1)
            if isinstance(right, ParseError):
                return right
            return self._close(ctor(left, right))
        if name in self.LISTS:
            ctor = self.LISTS[name]
            bracketed = sc.accept("[")
            items: list[FolFormula] = []
            while True:
                item = self.formula(depth + 1)
                if isinstance(item, ParseError):
                    return item
                items.append(item)
                if sc.accept(","):
                    continue
                break
            if bracketed and not sc.accept("]"):
                return sc.syntax_error("']' closing the %s members" % name)
            if len(items) < 2:
                return sc.error(
                    "%s needs at least 2 members, found %d" % (name, len(items)),
                    span=span,
                )
            result = self._close(ctor(tuple(items)))
            return result
        if name in self.QUANT:
            ctor = self.QUANT[name]
            st = scan_term(sc)
            if isinstance(st, ParseError):
                return st
            if not isinstance(st.term, Variable):
                return sc.error(
                    "%s binds a variable like $x1, found '%s'"
                    % (name, print_term(st.term)),
                    span=st.span,
                )
            self.var_spans.setdefault(st.term.name, st.span)
            if not sc.accept(","):
                return sc.syntax_error("',' after the bound variable of %s" % name)
            body = self.formula(depth + 1)
            if isinstance(body, ParseError):
                return body
            return self._close(ctor(st.term, body))
        return self.sc.error(
            "unknown connective '%s'; expected one of Atom, Not, And, "
            "AndList, Or, OrList, Implies, Equiv, Xor, Exists, Forall" % name,
            span=span,
        )

    def _atom(self) -> FolFormula | ParseError:
        sc = self.sc
        quoted = sc.take_quoted()
        if isinstance(quoted, ParseError):
            return quoted
        if quoted is not None:
            pred, pspan = quoted
        else:
            got = sc.take_ident()
            if got is None:
                return sc.syntax_error("a predicate name inside Atom(...)")
            pred, pspan = got
        if not pred or pred.startswith("$"):
            return sc.error("invalid predicate name '%s'" % pred, span=pspan)
        args = []
        while sc.accept(","):
            st = scan_term(sc)
            if isinstance(st, ParseError):
                return st
            if isinstance(st.term, Variable):
                self.var_spans.setdefault(st.term.name, st.span)
            args.append(st.term)
        if not sc.accept(")"):
            return sc.syntax_error("',' or ')' in Atom(...)")
        if not args:
            warnings.warn(
                "0-ary predicate '%s' at line %d" % (pred, sc.line),
                ParserWarning,
            )
        return Atom(pred, tuple(args))

    def _close(self, f: FolFormula) -> FolFormula | ParseError:
        if not self.sc.accept(")"):
            return self.sc.syntax_error("')'")
        return f


def parse_formula_line(line: ContentLine, errors: list[ParseError]) -> FolFormula | None:
    """One formula; free variables are refinable UnboundVariable errors."""
    code, _ = split_gloss(line)
    sc = LineScanner(code)
    reader = _FormulaScanner(sc)
    result = reader.formula()
    if isinstance(result, ParseError):
        errors.append(result)
        return None
    if not sc.at_end():
        errors.append(sc.syntax_error("end of line"))
        return None
    free = free_variables(result)
    if free:
        for v in sorted(free, key=lambda v: v.name):
            errors.append(
                ParseError(
                    reader.var_spans.get(
                        v.name, SourceSpan(line.number, line.column, len(line.text))
                    ),
                    ParseErrorKind.UNBOUND_VARIABLE,
                    "free variable '$%s' is not bound by any quantifier" % v.name,
                )
            )
        return None
    return result


def parse_fol(text: str) -> FolProblem:
    """Parse a first-order problem; raises ParseFailure with all
    diagnostics gathered."""
    errors: list[ParseError] = []
    sections, missing = split_sections(text, SECTION_HEADERS, errors)

    facts: list[FolFormula] = []
    fact_glosses: list[str | None] = []
    fact_spans: list[SourceSpan] = []
    for line in sections["Facts"]:
        _, gloss = split_gloss(line)
        formula = parse_formula_line(line, errors)
        if formula is not None:
            facts.append(formula)
            fact_glosses.append(gloss)
            fact_spans.append(SourceSpan(line.number, line.column, len(line.text)))

    query: FolFormula | None = None
    query_gloss: str | None = None
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
    else:
        _, query_gloss = split_gloss(query_lines[0])
        query = parse_formula_line(query_lines[0], errors)
        for extra in query_lines[1:]:
            probe: list[ParseError] = []
            if parse_formula_line(extra, probe) is not None:
                errors.append(
                    ParseError(
                        SourceSpan(extra.number, extra.column, len(extra.text)),
                        ParseErrorKind.SYNTAX,
                        "only one query formula is allowed; found extra '%s'"
                        % extra.text[:40],
                    )
                )
            else:
                warnings.warn(
                    "ignoring trailing prose after the query: %r"
                    % extra.text[:40],
                    ParserWarning,
                )

    # Arity is fixed per predicate across the whole problem.
    spanned: list[tuple[FolFormula, SourceSpan]] = list(zip(facts, fact_spans))
    if query is not None and query_lines:
        first = query_lines[0]
        spanned.append(
            (query, SourceSpan(first.number, first.column, len(first.text)))
        )
    arity: dict[str, int] = {}
    for formula, span in spanned:
        for atom in sorted(formula_atoms(formula), key=lambda a: a.text()):
            seen = arity.setdefault(atom.predicate, atom.arity)
            if seen != atom.arity:
                errors.append(
                    ParseError(
                        span,
                        ParseErrorKind.ARITY_MISMATCH,
                        "predicate '%s' used with arity %d but fixed at %d"
                        % (atom.predicate, atom.arity, seen),
                    )
                )

    if errors:
        raise ParseFailure(errors)
    assert query is not None
    return FolProblem(tuple(facts), query, tuple(fact_glosses), query_gloss)


# ---------------------------------------------------------------------------
# Printing


def print_formula(f: FolFormula) -> str:
    """Canonical constructor notation: predicates and constants quoted with
    single quotes, variables bare (`$x1`), lists bracketed."""
    if isinstance(f, Atom):
        head = f.predicate
        quote = "'" if "'" not in head else '"'
        parts = ["%s%s%s" % (quote, head, quote)]
        parts += [print_term(a, quote_constants=True) for a in f.args]
        return "Atom(%s)" % ", ".join(parts)
    if isinstance(f, Not):
        return "Not(%s)" % print_formula(f.sub)
    if isinstance(f, And):
        return "And(%s, %s)" % (print_formula(f.left), print_formula(f.right))
    if isinstance(f, Or):
        return "Or(%s, %s)" % (print_formula(f.left), print_formula(f.right))
    if isinstance(f, Implies):
        return "Implies(%s, %s)" % (print_formula(f.left), print_formula(f.right))
    if isinstance(f, Equiv):
        return "Equiv(%s, %s)" % (print_formula(f.left), print_formula(f.right))
    if isinstance(f, Xor):
        return "Xor(%s, %s)" % (print_formula(f.left), print_formula(f.right))
    if isinstance(f, AndList):
        return "AndList([%s])" % ", ".join(print_formula(g) for g in f.items)
    if isinstance(f, OrList):
        return "OrList([%s])" % ", ".join(print_formula(g) for g in f.items)
    if isinstance(f, Exists):
        return "Exists($%s, %s)" % (f.var.name, print_formula(f.body))
    if isinstance(f, Forall):
        return "Forall($%s, %s)" % (f.var.name, print_formula(f.body))
    raise TypeError("not a formula: %r" % (f,))


def _with_gloss(code: str, gloss: str | None) -> str:
    if gloss is None:
        return code
    return "%s ::: %s" % (code, gloss) if gloss else code + " :::"


def print_fol(problem: FolProblem) -> str:
    """Canonical text form; re-parses to an equal FolProblem."""
    lines = ["Facts:"]
    for formula, gloss in zip(problem.facts, problem.fact_glosses):
        lines.append(_with_gloss(print_formula(formula), gloss))
    lines.append("")
    lines.append("Query:")
    lines.append(_with_gloss(print_formula(problem.query), problem.query_gloss))
    return "\n".join(lines) + "\n"
