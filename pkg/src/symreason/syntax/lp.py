"""Deductive logic programs: `Predicates / Facts / Rules / Query` sections.

Rules use the `body && body >>> head` clause form; every line may carry an
`::: NL gloss`.  Parsing gathers all recoverable errors instead of stopping
at the first one.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from ..errors import ParseError, ParseErrorKind, ParseFailure, ParserWarning
from ..ir import Atom, SourceSpan, Variable
from .scanner import (
    ContentLine,
    LineScanner,
    bare_name_ok,
    print_term,
    scan_term,
    split_gloss,
    split_sections,
)

SECTION_HEADERS = ["Predicates", "Facts", "Rules", "Query"]
RULE_ARROW = ">>>"
CONJ = "&&"


@dataclass(frozen=True)
class PredicateSig:
    """Declared signature line, e.g. `Jompus($x, bool) ::: Does x ...`.

    Parameter tokens (sort markers like `bool` included) are recorded as
    written but not type-checked."""

    name: str
    params: tuple[str, ...]
    gloss: str | None = None

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class LpFact:
    atom: Atom
    gloss: str | None = None


@dataclass(frozen=True)
class LpRule:
    body: tuple[Atom, ...]
    head: tuple[Atom, ...]
    gloss: str | None = None


@dataclass(frozen=True)
class LpProgram:
    predicates: tuple[PredicateSig, ...]
    facts: tuple[LpFact, ...]
    rules: tuple[LpRule, ...]
    query: Atom
    query_gloss: str | None = None


@dataclass
class _ScannedAtom:
    atom: Atom
    span: SourceSpan
    arg_spans: list[SourceSpan]


def _scan_atom(sc: LineScanner, errors: list[ParseError]) -> _ScannedAtom | None:
    start = sc.pos
    got = sc.take_ident()
    if got is None:
        errors.append(sc.syntax_error("a predicate name"))
        return None
    name, _ = got
    if not sc.accept("("):
        errors.append(sc.syntax_error("'(' after predicate '%s'" % name))
        return None
    args = []
    if not sc.accept(")"):
        while True:
            st = scan_term(sc)
            if isinstance(st, ParseError):
                errors.append(st)
                return None
            args.append(st)
            if sc.accept(","):
                continue
            if sc.accept(")"):
                break
            errors.append(sc.syntax_error("',' or ')' in argument list"))
            return None
    if not args:
        warnings.warn(
            "0-ary predicate '%s' at line %d" % (name, sc.line), ParserWarning
        )
    return _ScannedAtom(
        Atom(name, tuple(a.term for a in args)),
        sc.span(start, sc.pos - start),
        [a.span for a in args],
    )


def _expect_line_end(sc: LineScanner, errors: list[ParseError]) -> bool:
    if not sc.at_end():
        errors.append(sc.syntax_error("end of line"))
        return False
    return True


def _scan_signature(line: ContentLine, errors: list[ParseError]) -> PredicateSig | None:
    code, gloss = split_gloss(line)
    sc = LineScanner(code)
    got = sc.take_ident()
    if got is None:
        errors.append(sc.syntax_error("a predicate name"))
        return None
    name, _ = got
    if not sc.accept("("):
        errors.append(sc.syntax_error("'(' after predicate '%s'" % name))
        return None
    params: list[str] = []
    if not sc.accept(")"):
        while True:
            sc.skip_ws()
            if sc.peek() == "$":
                sc.pos += 1
                got = sc.take_ident()
                if got is None:
                    errors.append(sc.syntax_error("a parameter name after '$'"))
                    return None
                params.append("$" + got[0])
            elif (got := sc.take_ident()) is not None:
                params.append(got[0])
            elif (got_int := sc.take_int()) is not None:
                params.append(str(got_int[0]))
            else:
                errors.append(sc.syntax_error("a parameter"))
                return None
            if sc.accept(","):
                continue
            if sc.accept(")"):
                break
            errors.append(sc.syntax_error("',' or ')' in parameter list"))
            return None
    if not _expect_line_end(sc, errors):
        return None
    if not params:
        warnings.warn(
            "0-ary predicate '%s' declared at line %d" % (name, line.number),
            ParserWarning,
        )
    return PredicateSig(name, tuple(params), gloss)


_AtomLog = list[tuple[Atom, SourceSpan]]


def _scan_fact(
    line: ContentLine, errors: list[ParseError], atom_log: _AtomLog
) -> LpFact | None:
    code, gloss = split_gloss(line)
    sc = LineScanner(code)
    scanned = _scan_atom(sc, errors)
    if scanned is None:
        return None
    atom_log.append((scanned.atom, scanned.span))
    if not _expect_line_end(sc, errors):
        return None
    ok = True
    for span, arg in zip(scanned.arg_spans, scanned.atom.args):
        if isinstance(arg, Variable):
            errors.append(
                ParseError(
                    span,
                    ParseErrorKind.UNBOUND_VARIABLE,
                    "fact %s must be ground; '$%s' is a variable"
                    % (scanned.atom.text(), arg.name),
                )
            )
            ok = False
    return LpFact(scanned.atom, gloss) if ok else None


def _scan_rule(
    line: ContentLine, errors: list[ParseError], atom_log: _AtomLog
) -> LpRule | None:
    code, gloss = split_gloss(line)
    sc = LineScanner(code)

    def conjunction() -> list[_ScannedAtom] | None:
        atoms: list[_ScannedAtom] = []
        while True:
            scanned = _scan_atom(sc, errors)
            if scanned is None:
                return None
            atom_log.append((scanned.atom, scanned.span))
            atoms.append(scanned)
            if sc.accept(CONJ):
                continue
            return atoms

    body = conjunction()
    if body is None:
        return None
    if not sc.accept(RULE_ARROW):
        errors.append(sc.syntax_error("'%s' or '%s'" % (CONJ, RULE_ARROW)))
        return None
    head = conjunction()
    if head is None:
        return None
    if not _expect_line_end(sc, errors):
        return None

    body_vars = {v.name for s in body for v in s.atom.variables()}
    ok = True
    for scanned in head:
        for span, arg in zip(scanned.arg_spans, scanned.atom.args):
            if isinstance(arg, Variable) and arg.name not in body_vars:
                errors.append(
                    ParseError(
                        span,
                        ParseErrorKind.UNBOUND_VARIABLE,
                        "head variable '$%s' does not occur in the rule body"
                        % arg.name,
                    )
                )
                ok = False
    if not ok:
        return None
    return LpRule(tuple(s.atom for s in body), tuple(s.atom for s in head), gloss)


def parse_lp(text: str) -> LpProgram:
    """Parse a deductive logic program; raises ParseFailure with every
    recoverable diagnostic collected."""
    errors: list[ParseError] = []
    atom_log: _AtomLog = []
    sections, missing = split_sections(text, SECTION_HEADERS, errors)

    predicates = [
        sig
        for line in sections["Predicates"]
        if (sig := _scan_signature(line, errors)) is not None
    ]
    facts = [
        fact
        for line in sections["Facts"]
        if (fact := _scan_fact(line, errors, atom_log)) is not None
    ]
    rules = [
        rule
        for line in sections["Rules"]
        if (rule := _scan_rule(line, errors, atom_log)) is not None
    ]

    used_predicates = {a.predicate for a, _ in atom_log} | {
        s.name for s in predicates
    }

    query: Atom | None = None
    query_gloss: str | None = None
    query_span: SourceSpan | None = None
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
        code, query_gloss = split_gloss(query_lines[0])
        sc = LineScanner(code)
        scanned = _scan_atom(sc, errors)
        if scanned is not None:
            atom_log.append((scanned.atom, scanned.span))
            query_span = scanned.span
            if _expect_line_end(sc, errors):
                query = scanned.atom
        _reject_extra_query_lines(query_lines[1:], errors)

    # Arity is fixed per predicate: declarations first, then first use.
    arity: dict[str, int] = {}
    for sig in predicates:
        arity.setdefault(sig.name, sig.arity)
    for atom, span in atom_log:
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

    if query is not None and query.predicate not in used_predicates:
        errors.append(
            ParseError(
                query_span or SourceSpan(1, 1, 0),
                ParseErrorKind.UNKNOWN_PREDICATE,
                "query predicate '%s' is never declared or used"
                % query.predicate,
            )
        )

    if errors:
        raise ParseFailure(errors)
    assert query is not None
    return LpProgram(
        tuple(predicates), tuple(facts), tuple(rules), query, query_gloss
    )


def _reject_extra_query_lines(extras: list[ContentLine], errors: list[ParseError]):
    """A second parseable query atom is an error; unparseable trailing
    chatter is ignored with a warning."""
    for extra in extras:
        probe: list[ParseError] = []
        code, _ = split_gloss(extra)
        sc = LineScanner(code)
        scanned = _scan_atom(sc, probe)
        if scanned is not None and sc.at_end():
            errors.append(
                ParseError(
                    SourceSpan(extra.number, extra.column, len(extra.text)),
                    ParseErrorKind.SYNTAX,
                    "only one query atom is allowed; found extra '%s'"
                    % extra.text[:40],
                )
            )
        else:
            warnings.warn(
                "ignoring trailing prose after the query: %r" % extra.text[:40],
                ParserWarning,
            )


# ---------------------------------------------------------------------------
# Printing


def print_atom(atom: Atom) -> str:
    return "%s(%s)" % (
        atom.predicate,
        ", ".join(print_term(a) for a in atom.args),
    )


def _with_gloss(code: str, gloss: str | None) -> str:
    if gloss is None:
        return code
    return "%s ::: %s" % (code, gloss) if gloss else code + " :::"


def print_lp(program: LpProgram) -> str:
    """Canonical text form; re-parses to an equal LpProgram."""
    lines: list[str] = ["Predicates:"]
    for sig in program.predicates:
        code = "%s(%s)" % (sig.name, ", ".join(sig.params))
        lines.append(_with_gloss(code, sig.gloss))
    lines.append("")
    lines.append("Facts:")
    for fact in program.facts:
        lines.append(_with_gloss(print_atom(fact.atom), fact.gloss))
    lines.append("")
    lines.append("Rules:")
    for rule in program.rules:
        code = "%s %s %s" % (
            " && ".join(print_atom(a) for a in rule.body),
            RULE_ARROW,
            " && ".join(print_atom(a) for a in rule.head),
        )
        lines.append(_with_gloss(code, rule.gloss))
    lines.append("")
    lines.append("Query:")
    lines.append(_with_gloss(print_atom(program.query), program.query_gloss))
    return "\n".join(lines) + "\n"
