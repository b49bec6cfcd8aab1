"""Recursive-descent parser for polynomial expressions.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' INT)?
    atom   := NUMBER | IDENT | '(' expr ')'
"""

from __future__ import annotations

import re
from typing import Iterable

from .polynomial import Polynomial

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()]))"
)


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, position: int, source: str):
        super().__init__(f"{message} at position {position} in {source!r}")
        self.position = position
        self.source = source


class UnknownVariableError(ValueError):
    def __init__(self, name: str):
        super().__init__(f"unknown variable {name!r}")
        self.name = name


def _tokenize(src: str):
    pos = 0
    tokens = []
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise PolynomialSyntaxError(f"unexpected character {src[pos]!r}", pos, src)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, allowed: set[str] | None):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0
        self.allowed = allowed

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str):
        raise PolynomialSyntaxError(message, self.peek()[2], self.src)

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            self.error("empty expression")
        out = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return out

    def expr(self) -> Polynomial:
        out = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> Polynomial:
        out = self.unary()
        while self.peek()[0:2] == ("op", "*"):
            self.take()
            out = out * self.unary()
        return out

    def unary(self) -> Polynomial:
        if self.peek()[0:2] == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek()[0:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek()[0:2] == ("op", "^"):
            self.take()
            kind, text, _ = self.peek()
            if kind != "num" or not text.isdigit():
                self.error("exponent must be a nonnegative integer")
            self.take()
            return base ** int(text)
        return base

    def atom(self) -> Polynomial:
        kind, text, _ = self.peek()
        if kind == "num":
            self.take()
            return Polynomial.constant(float(text))
        if kind == "id":
            if self.allowed is not None and text not in self.allowed:
                raise UnknownVariableError(text)
            self.take()
            return Polynomial.var(text)
        if (kind, text) == ("op", "("):
            self.take()
            inner = self.expr()
            if self.peek()[0:2] != ("op", ")"):
                self.error("expected ')'")
            self.take()
            return inner
        self.error("expected a number, variable or '('" if kind != "end" else "unexpected end of input")


def parse_polynomial(src: str, variables: Iterable[str] | None = None) -> Polynomial:
    """Parse ``src`` into a canonical polynomial.

    When ``variables`` is given, any other identifier raises
    :class:`UnknownVariableError`.
    """
    allowed = None if variables is None else set(variables)
    return _Parser(src, allowed).parse()
