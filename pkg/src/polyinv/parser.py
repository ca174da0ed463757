"""Recursive-descent parser for the polynomial map text format.

Grammar::

    document := "vars:" ident+ NEWLINE (ident "=" expr NEWLINE)+
    expr     := term (("+" | "-") term)*
    term     := factor ("*" factor)*
    factor   := base ("^" natural)?
    base     := rational | ident | "(" expr ")" | "-" factor
    rational := integer ("/" positive-integer)?

``#`` starts a comment that runs to the end of the line. Blank lines are
ignored. Component ``i`` is the ``i``-th assignment, whatever its left-hand
name.
"""

from __future__ import annotations

import re
from collections.abc import Sequence
from dataclasses import dataclass, field

from gmpy2 import mpq

from .poly import Poly, power
from .polymap import PolynomialMap

__all__ = ["ParseError", "MapDocument", "parse_document", "parse_map", "parse_poly", "format_map", "MAX_EXPONENT"]

MAX_EXPONENT = 4096

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<vars>vars:)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()=])
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            toks.append(_Tok("nl", "\n", line, pos - line_start + 1))
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("nl", "", line, pos - line_start + 1))
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


@dataclass
class MapDocument:
    names: list[str]
    lhs: list[str] = field(default_factory=list)
    components: list[Poly] = field(default_factory=list)
    positions: list[tuple[int, int]] = field(default_factory=list)

    def to_map(self) -> PolynomialMap:
        return PolynomialMap(self.components)


class _Parser:
    def __init__(self, toks: list[_Tok], names: Sequence[str]):
        self.toks = toks
        self.i = 0
        self.set_names(names)

    def set_names(self, names: Sequence[str]) -> None:
        self.names = list(names)
        self.index = {n: k for k, n in enumerate(self.names)}
        self.n = len(self.names)

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def accept(self, kind: str, text: str | None = None) -> _Tok | None:
        t = self.tok
        if t.kind == kind and (text is None or t.text == text):
            self.i += 1
            return t
        return None

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> _Tok:
        t = self.accept(kind, text)
        if t is None:
            found = self.tok.text or ("end of line" if self.tok.kind == "nl" else "end of input")
            self.error(f"expected {what or text or kind}, found {found!r}")
        return t

    def skip_newlines(self) -> None:
        while self.accept("nl"):
            pass

    def document(self) -> MapDocument:
        self.skip_newlines()
        self.expect("vars", what="'vars:' header")
        names = []
        while self.tok.kind == "ident":
            t = self.accept("ident")
            if t.text in names:
                self.error(f"duplicate variable {t.text!r}", t)
            names.append(t.text)
        if not names:
            self.error("expected at least one variable name")
        self.expect("nl", what="end of line")
        self.set_names(names)
        doc = MapDocument(names=names)
        self.skip_newlines()
        while self.tok.kind != "eof":
            lhs = self.expect("ident", what="component name")
            self.expect("op", "=")
            doc.lhs.append(lhs.text)
            doc.positions.append((lhs.line, lhs.col))
            doc.components.append(self.expr())
            self.expect("nl", what="end of line")
            self.skip_newlines()
        if len(doc.components) != len(names):
            self.error(f"expected {len(names)} components, found {len(doc.components)}")
        return doc

    def expr(self) -> Poly:
        acc = self.term()
        while True:
            if self.accept("op", "+"):
                acc = acc + self.term()
            elif self.accept("op", "-"):
                acc = acc - self.term()
            else:
                return acc

    def term(self) -> Poly:
        acc = self.factor()
        while self.accept("op", "*"):
            acc = acc * self.factor()
        return acc

    def factor(self) -> Poly:
        base = self.base()
        if self.accept("op", "^"):
            t = self.expect("int", what="natural exponent")
            e = int(t.text)
            if e > MAX_EXPONENT:
                self.error(f"exponent {e} exceeds the limit {MAX_EXPONENT}", t)
            return power(base, e)
        return base

    def base(self) -> Poly:
        t = self.tok
        if self.accept("int"):
            num = int(t.text)
            if self.accept("op", "/"):
                d = self.expect("int", what="positive denominator")
                den = int(d.text)
                if den == 0:
                    self.error("zero denominator", d)
                return Poly.constant(self.n, mpq(num, den))
            return Poly.constant(self.n, num)
        if self.accept("ident"):
            k = self.index.get(t.text)
            if k is None:
                self.error(f"unknown variable {t.text!r}", t)
            return Poly.var(self.n, k)
        if self.accept("op", "("):
            inner = self.expr()
            self.expect("op", ")")
            return inner
        if self.accept("op", "-"):
            return -self.factor()
        self.error(f"unexpected {t.text!r}" if t.text else "unexpected end of line")


def parse_document(text: str) -> MapDocument:
    return _Parser(_tokenize(text), []).document()


def parse_map(text: str) -> PolynomialMap:
    return parse_document(text).to_map()


def parse_poly(text: str, names: Sequence[str]) -> Poly:
    """Parse a single expression over the given variable names."""
    p = _Parser(_tokenize(text), names)
    out = p.expr()
    p.expect("nl", what="end of expression")
    p.skip_newlines()
    if p.tok.kind != "eof":
        p.error("trailing input")
    return out


def format_map(F: Sequence[Poly], names: Sequence[str] | None = None, comment: str | None = None) -> str:
    """Serialize a map in the format accepted by :func:`parse_map`."""
    n = len(F)
    if names is None:
        names = [f"x{i + 1}" for i in range(n)]
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append("vars: " + " ".join(names))
    for i, f in enumerate(F):
        lines.append(f"F{i + 1} = {f.format(names)}")
    return "\n".join(lines) + "\n"
