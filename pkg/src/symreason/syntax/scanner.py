"""Shared machinery for the three section-based surface languages.

Input is cut into named sections (`Header:` lines, matched case-insensitively),
then each content line is scanned left to right.  Every token remembers its
1-based line/column so diagnostics can point at the exact offending text.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass

from ..errors import ParseError, ParseErrorKind, ParserWarning
from ..ir import BoolLiteral, Constant, IntLiteral, SourceSpan, Term, Variable

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
INT_RE = re.compile(r"-?[0-9]+")
GLOSS_MARKER = ":::"


@dataclass(frozen=True)
class ContentLine:
    """One non-header line of a section, with its position in the input."""

    number: int  # 1-based line number in the original text
    column: int  # 1-based column where `text` starts
    text: str


def split_gloss(line: ContentLine) -> tuple[ContentLine, str | None]:
    """Split `symbolic_formula ::: NL_statement`; the gloss never affects
    the parsed logic."""
    idx = line.text.find(GLOSS_MARKER)
    if idx < 0:
        return line, None
    code = line.text[:idx]
    gloss = line.text[idx + len(GLOSS_MARKER):].strip()
    return ContentLine(line.number, line.column, code), gloss


def split_sections(
    text: str, headers: list[str], errors: list[ParseError]
) -> tuple[dict[str, list[ContentLine]], set[str]]:
    """Partition input into the given sections.

    Header lines look like `Facts:`; matching is case-insensitive and
    whitespace-tolerant, and content on the header line itself is kept.
    Text before the first header is ignored with a warning; a missing
    header becomes a MissingSection error.  Returns the section map and
    the set of missing section names.
    """
    lower = {h.lower(): h for h in headers}
    header_re = re.compile(
        r"^\s*(%s)\s*:(.*)$" % "|".join(re.escape(h) for h in headers),
        re.IGNORECASE,
    )
    sections: dict[str, list[ContentLine]] = {h: [] for h in headers}
    seen: set[str] = set()
    current: str | None = None
    preamble = False
    for idx, raw in enumerate(text.splitlines(), start=1):
        m = header_re.match(raw)
        if m:
            current = lower[m.group(1).lower()]
            seen.add(current)
            rest = m.group(2)
            if rest.strip():
                col = m.start(2) + 1 + (len(rest) - len(rest.lstrip()))
                sections[current].append(ContentLine(idx, col, rest.strip()))
            continue
        if not raw.strip():
            continue
        if current is None:
            preamble = True
            continue
        stripped = raw.strip()
        col = 1 + (len(raw) - len(raw.lstrip()))
        sections[current].append(ContentLine(idx, col, stripped))
    if preamble:
        warnings.warn(
            "ignoring text before the first section header", ParserWarning
        )
    missing = {h for h in headers if h not in seen}
    for h in headers:
        if h in missing:
            errors.append(
                ParseError(
                    SourceSpan(1, 1, 0),
                    ParseErrorKind.MISSING_SECTION,
                    "missing required section '%s:'" % h,
                )
            )
    return sections, missing


class LineScanner:
    """Cursor over one content line; produces spanned tokens."""

    def __init__(self, line: ContentLine):
        self.text = line.text
        self.line = line.number
        self.col0 = line.column
        self.pos = 0

    def span(self, start: int, length: int) -> SourceSpan:
        return SourceSpan(self.line, self.col0 + start, length)

    def here(self) -> SourceSpan:
        return self.span(self.pos, 1 if self.pos < len(self.text) else 0)

    def error(
        self,
        message: str,
        kind: ParseErrorKind = ParseErrorKind.SYNTAX,
        span: SourceSpan | None = None,
    ) -> ParseError:
        return ParseError(span or self.here(), kind, message)

    def syntax_error(self, expected: str) -> ParseError:
        """A Syntax diagnostic naming the nearest expected token."""
        if self.pos >= len(self.text):
            found = "end of line"
        else:
            found = "'%s'" % self.rest()[:12]
        return self.error("expected %s, found %s" % (expected, found))

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def rest(self) -> str:
        return self.text[self.pos:]

    def accept(self, literal: str) -> bool:
        self.skip_ws()
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def take_ident(self) -> tuple[str, SourceSpan] | None:
        self.skip_ws()
        m = IDENT_RE.match(self.text, self.pos)
        if not m:
            return None
        self.pos = m.end()
        return m.group(0), self.span(m.start(), m.end() - m.start())

    def take_int(self) -> tuple[int, SourceSpan] | None:
        self.skip_ws()
        m = INT_RE.match(self.text, self.pos)
        if not m:
            return None
        self.pos = m.end()
        return int(m.group(0)), self.span(m.start(), m.end() - m.start())

    def take_quoted(self) -> tuple[str, SourceSpan] | None | ParseError:
        """A `'name'` or `"name"` token; either quote style is accepted."""
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] not in "'\"":
            return None
        quote = self.text[self.pos]
        start = self.pos
        end = self.text.find(quote, self.pos + 1)
        if end < 0:
            return self.error(
                "unterminated quoted name starting at '%s'"
                % self.text[start : start + 8],
                span=self.span(start, len(self.text) - start),
            )
        self.pos = end + 1
        return self.text[start + 1 : end], self.span(start, end + 1 - start)


@dataclass
class SpannedTerm:
    term: Term
    span: SourceSpan


def scan_term(sc: LineScanner) -> SpannedTerm | ParseError:
    """One argument term: variable (`$x`), constant, integer, boolean, or a
    quoted name (a `$`-prefixed quoted name is still a variable)."""
    sc.skip_ws()
    start = sc.pos
    if sc.peek() == "$":
        sc.pos += 1
        got = sc.take_ident()
        if got is None:
            return sc.error("expected variable name after '$'")
        name, span = got
        return SpannedTerm(Variable(name), sc.span(start, sc.pos - start))
    quoted = sc.take_quoted()
    if isinstance(quoted, ParseError):
        return quoted
    if quoted is not None:
        name, span = quoted
        if name.startswith("$"):
            bare = name[1:]
            if not IDENT_RE.fullmatch(bare):
                return sc.error(
                    "invalid variable name '%s'" % name, span=span
                )
            return SpannedTerm(Variable(bare), span)
        if not name:
            return sc.error("empty quoted name", span=span)
        return SpannedTerm(Constant(name), span)
    got_int = sc.take_int()
    if got_int is not None:
        value, span = got_int
        return SpannedTerm(IntLiteral(value), span)
    got = sc.take_ident()
    if got is not None:
        name, span = got
        if name == "True":
            return SpannedTerm(BoolLiteral(True), span)
        if name == "False":
            return SpannedTerm(BoolLiteral(False), span)
        return SpannedTerm(Constant(name), span)
    return sc.syntax_error("a term (variable, name, number, or boolean)")


def bare_name_ok(name: str) -> bool:
    """True when a name can be printed without quotes."""
    return bool(IDENT_RE.fullmatch(name)) and name not in ("True", "False")


def print_term(t: Term, quote_constants: bool = False) -> str:
    """Render a term; FOL style quotes constants that need it (or always,
    when `quote_constants`)."""
    if isinstance(t, Constant):
        if quote_constants or not bare_name_ok(t.name):
            quote = "'" if "'" not in t.name else '"'
            return "%s%s%s" % (quote, t.name, quote)
        return t.name
    if isinstance(t, Variable):
        return "$" + t.name
    if isinstance(t, IntLiteral):
        return str(t.value)
    if isinstance(t, BoolLiteral):
        return "True" if t.value else "False"
    raise TypeError("term has no surface syntax: %r" % (t,))
