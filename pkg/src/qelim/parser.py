"""Reading and writing formulas in the package's s-expression syntax.

Grammar (one formula per file, ``#`` starts a line comment)::

    formula  := "true" | "false" | atom
              | "(" "and" formula+ ")" | "(" "or" formula+ ")"
              | "(" "not" formula ")" | "(" "=>" formula formula ")"
              | "(" ("exists"|"forall") "(" var+ ")" formula ")"
    atom     := "(" (">="|">"|"<="|"<"|"=") term term ")"
    term     := var | rational | "(" "+" term+ ")"
              | "(" "-" term term? ")" | "(" "*" rational term ")"
    rational := integer | integer "/" positive-integer

``<=`` and ``<`` normalize by negating the term.  A file may start with an
optional ``(declare-vars x y ...)`` header; if present, every free variable
of the formula must be declared.  Nonlinear products are rejected: the first
argument of ``*`` must be a rational literal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    BoolConst,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Relation,
    atom,
    conj,
    disj,
    exists,
    forall,
    free_vars,
    neg,
)
from .terms import LinearTerm, Var


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class UnboundSymbolError(ParseError):
    pass


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
_NUMBER = re.compile(r"-?[0-9]+(/[0-9]+)?\Z")
_KEYWORDS = frozenset(
    ["true", "false", "and", "or", "not", "exists", "forall", "declare-vars"]
)


@dataclass(frozen=True)
class _Token:
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == "#":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            tokens.append(_Token(ch, line, col))
            col += 1
            i += 1
        else:
            start = i
            start_col = col
            while i < n and text[i] not in " \t\r\n()#":
                i += 1
                col += 1
            tokens.append(_Token(text[start:i], line, start_col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self._tokens = tokens
        self._pos = 0
        self.var_sites: dict[Var, tuple[int, int]] = {}

    def _error(self, message: str, tok: _Token | None = None) -> ParseError:
        if tok is None:
            if self._tokens:
                last = self._tokens[-1]
                return ParseError(message, last.line, last.col + len(last.text))
            return ParseError(message, 1, 1)
        return ParseError(message, tok.line, tok.col)

    def peek(self) -> _Token | None:
        return self._tokens[self._pos] if self._pos < len(self._tokens) else None

    def next(self, expected: str | None = None) -> _Token:
        tok = self.peek()
        if tok is None:
            raise self._error(f"unexpected end of input, expected {expected or 'a token'}")
        self._pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next(repr(text))
        if tok.text != text:
            raise self._error(f"expected {text!r}, found {tok.text!r}", tok)
        return tok

    def at_end(self) -> bool:
        return self._pos >= len(self._tokens)

    # -- formulas ---------------------------------------------------------

    def parse_formula(self) -> Formula:
        tok = self.next("a formula")
        if tok.text == "true":
            return TRUE
        if tok.text == "false":
            return FALSE
        if tok.text != "(":
            raise self._error(f"expected a formula, found {tok.text!r}", tok)
        head = self.next("a connective or relation")
        if head.text in ("and", "or"):
            children = []
            while self.peek() is not None and self.peek().text != ")":
                children.append(self.parse_formula())
            self.expect(")")
            if not children:
                raise self._error(f"{head.text!r} needs at least one argument", head)
            return conj(children) if head.text == "and" else disj(children)
        if head.text == "not":
            child = self.parse_formula()
            self.expect(")")
            return neg(child)
        if head.text == "=>":
            a = self.parse_formula()
            b = self.parse_formula()
            self.expect(")")
            return disj([neg(a), b])
        if head.text in ("exists", "forall"):
            self.expect("(")
            names = []
            while self.peek() is not None and self.peek().text != ")":
                names.append(self._var_name(self.next("a variable")))
            self.expect(")")
            if not names:
                raise self._error(f"{head.text!r} needs at least one variable", head)
            body = self.parse_formula()
            self.expect(")")
            return exists(names, body) if head.text == "exists" else forall(names, body)
        if head.text in (">=", ">", "<=", "<", "="):
            left = self.parse_term()
            right = self.parse_term()
            self.expect(")")
            diff = left - right
            if head.text == ">=":
                return atom(diff, Relation.GE)
            if head.text == ">":
                return atom(diff, Relation.GT)
            if head.text == "<=":
                return atom(-diff, Relation.GE)
            if head.text == "<":
                return atom(-diff, Relation.GT)
            return atom(diff, Relation.EQ)
        raise self._error(f"unknown operator {head.text!r}", head)

    # -- terms ------------------------------------------------------------

    def parse_term(self) -> LinearTerm:
        tok = self.next("a term")
        if tok.text != "(":
            if _NUMBER.match(tok.text):
                return LinearTerm.const(self._rational(tok))
            return LinearTerm.variable(self._var_name(tok))
        op = self.next("'+', '-' or '*'")
        if op.text == "+":
            args = []
            while self.peek() is not None and self.peek().text != ")":
                args.append(self.parse_term())
            self.expect(")")
            if not args:
                raise self._error("'+' needs at least one argument", op)
            total = args[0]
            for t in args[1:]:
                total = total + t
            return total
        if op.text == "-":
            first = self.parse_term()
            if self.peek() is not None and self.peek().text != ")":
                second = self.parse_term()
                self.expect(")")
                return first - second
            self.expect(")")
            return -first
        if op.text == "*":
            factor_tok = self.next("a rational literal")
            if not _NUMBER.match(factor_tok.text):
                raise self._error(
                    "first argument of '*' must be a rational literal "
                    "(nonlinear products are not supported)",
                    factor_tok,
                )
            factor = self._rational(factor_tok)
            t = self.parse_term()
            self.expect(")")
            return t.scale(factor)
        raise self._error(f"unknown term operator {op.text!r}", op)

    def _rational(self, tok: _Token) -> Fraction:
        text = tok.text
        if "/" in text:
            num, den = text.split("/")
            if int(den) <= 0:
                raise self._error("denominator must be a positive integer", tok)
            return Fraction(int(num), int(den))
        return Fraction(int(text))

    def _var_name(self, tok: _Token) -> Var:
        if not _IDENT.match(tok.text) or tok.text in _KEYWORDS:
            raise self._error(f"expected a variable name, found {tok.text!r}", tok)
        self.var_sites.setdefault(tok.text, (tok.line, tok.col))
        return tok.text


def parse(text: str) -> Formula:
    """Parse one formula (with an optional declare-vars header)."""
    tokens = _tokenize(text)
    parser = _Parser(tokens)
    declared: set[Var] | None = None
    if (
        len(tokens) >= 2
        and tokens[0].text == "("
        and tokens[1].text == "declare-vars"
    ):
        parser.next()
        header = parser.next()
        declared = set()
        while parser.peek() is not None and parser.peek().text != ")":
            declared.add(parser._var_name(parser.next("a variable")))
        parser.expect(")")
        if not declared:
            raise parser._error("'declare-vars' needs at least one variable", header)
    f = parser.parse_formula()
    if not parser.at_end():
        raise parser._error(
            f"trailing input after the formula: {parser.peek().text!r}", parser.peek()
        )
    if declared is not None:
        for v in sorted(free_vars(f)):
            if v not in declared:
                line, col = parser.var_sites.get(v, (1, 1))
                raise UnboundSymbolError(f"undeclared variable {v!r}", line, col)
    return f


def parse_file(path: str) -> Formula:
    with open(path, "r", encoding="utf-8") as handle:
        return parse(handle.read())


# -- printing ---------------------------------------------------------------


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_term(t: LinearTerm) -> str:
    parts = []
    for v, c in t.coeffs:
        parts.append(v if c == 1 else f"(* {format_rational(c)} {v})")
    if t.constant != 0 or not parts:
        parts.append(format_rational(t.constant))
    if len(parts) == 1:
        return parts[0]
    return "(+ " + " ".join(parts) + ")"


def format_atom(a: Atom) -> str:
    return f"({a.rel.value} {format_term(a.term)} 0)"


def format_formula(f: Formula) -> str:
    if isinstance(f, BoolConst):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        return format_atom(f)
    if isinstance(f, Not):
        return f"(not {format_formula(f.child)})"
    if isinstance(f, And):
        return "(and " + " ".join(format_formula(c) for c in f.children) + ")"
    if isinstance(f, Or):
        return "(or " + " ".join(format_formula(c) for c in f.children) + ")"
    if isinstance(f, Exists):
        return f"(exists ({' '.join(f.bound)}) {format_formula(f.child)})"
    if isinstance(f, Forall):
        return f"(forall ({' '.join(f.bound)}) {format_formula(f.child)})"
    raise TypeError(f"not a formula: {f!r}")
