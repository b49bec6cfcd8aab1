"""Parser for the HyperLTL surface syntax.

Example: ``forall p1. exists p2. a1[p1] -> (a2[p2] & G a3[p1,p2])``.

Precedence from tightest: unary operators (``! X G F``), ``U``/``R``
(right associative), ``&``, ``|``, ``->`` (right associative).
"""

from __future__ import annotations

import re
from typing import Mapping

from .syntax import (FALSE, TRUE, And, Atom, Eventually, Globally, HyperLTLFormula, Implies, Next,
                     Not, Or, Quantifier, Release, Until, Body, atoms)

_TOKEN = re.compile(r"\s*(?:(?P<op>->|[!&|()\[\],.])|(?P<id>[A-Za-z_][A-Za-z0-9_]*))")
_TEMPORAL_UNARY = {"X": Next, "G": Globally, "F": Eventually}
_TEMPORAL_BINARY = {"U": Until, "R": Release}
_KEYWORDS = {"forall", "exists", "true", "false", *_TEMPORAL_UNARY, *_TEMPORAL_BINARY}


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int, source: str):
        super().__init__(f"{message} at position {position} in {source!r}")
        self.position = position


class FormulaScopeError(ValueError):
    """Unbound trace variable, duplicate binder, or atom arity mismatch."""


def _tokenize(src: str):
    tokens, pos = [], 0
    while pos < len(src):
        if not src[pos:].strip():
            break
        m = _TOKEN.match(src, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {src[pos]!r}", pos, src)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self, k: int = 0):
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at(self, text: str) -> bool:
        kind, t, _ = self.peek()
        return kind != "end" and t == text

    def expect(self, text: str):
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.take()

    def fail(self, message: str):
        raise FormulaSyntaxError(message, self.peek()[2], self.src)

    def formula(self) -> HyperLTLFormula:
        prefix = []
        while self.at("forall") or self.at("exists"):
            kind = self.take()[1]
            tkind, name, _ = self.peek()
            if tkind != "id" or name in _KEYWORDS:
                self.fail("expected a trace variable")
            self.take()
            self.expect(".")
            prefix.append(Quantifier(kind, name))
        body = self.implication()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return HyperLTLFormula(tuple(prefix), body)

    def implication(self) -> Body:
        left = self.disjunction()
        if self.at("->"):
            self.take()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Body:
        left = self.conjunction()
        while self.at("|"):
            self.take()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Body:
        left = self.binary_temporal()
        while self.at("&"):
            self.take()
            left = And(left, self.binary_temporal())
        return left

    def binary_temporal(self) -> Body:
        left = self.unary()
        kind, text, _ = self.peek()
        if kind == "id" and text in _TEMPORAL_BINARY:
            self.take()
            return _TEMPORAL_BINARY[text](left, self.binary_temporal())
        return left

    def unary(self) -> Body:
        kind, text, _ = self.peek()
        if self.at("!"):
            self.take()
            return Not(self.unary())
        if kind == "id" and text in _TEMPORAL_UNARY and not self._is_atom_head():
            self.take()
            return _TEMPORAL_UNARY[text](self.unary())
        return self.primary()

    def _is_atom_head(self) -> bool:
        return self.peek(1)[1] == "[" and self.peek(1)[0] == "op"

    def primary(self) -> Body:
        kind, text, _ = self.peek()
        if self.at("("):
            self.take()
            inner = self.implication()
            self.expect(")")
            return inner
        if kind == "id":
            if text in ("forall", "exists"):
                self.fail("quantifiers are only allowed in the prefix")
            if text == "true":
                self.take()
                return TRUE
            if text == "false":
                self.take()
                return FALSE
            if self._is_atom_head():
                self.take()
                self.expect("[")
                traces = []
                while True:
                    tkind, tname, _ = self.peek()
                    if tkind != "id":
                        self.fail("expected a trace variable")
                    traces.append(self.take()[1])
                    if self.at(","):
                        self.take()
                        continue
                    self.expect("]")
                    break
                return Atom(text, tuple(traces))
            self.fail(f"atom {text!r} must be applied to trace variables, e.g. {text}[p]")
        self.fail("expected a formula" if kind != "end" else "unexpected end of input")


def parse_hyperltl(src: str, atom_arity: Mapping[str, int] | None = None) -> HyperLTLFormula:
    """Parse a closed prenex HyperLTL formula.

    ``atom_arity`` maps each declared atom to the number of trace variables it
    takes (1 for single-trace atoms). When given, undeclared atoms and arity
    mismatches are rejected.
    """
    f = _Parser(src).formula()
    bound = f.trace_vars
    if len(set(bound)) != len(bound):
        raise FormulaScopeError(f"trace variables bound more than once: {bound}")
    for a in sorted(atoms(f.body)):
        free = [t for t in a.traces if t not in bound]
        if free:
            raise FormulaScopeError(f"unbound trace variable(s) {free} in {a}")
        if atom_arity is not None:
            if a.name not in atom_arity:
                raise FormulaScopeError(f"undeclared atom {a.name!r}")
            if atom_arity[a.name] != len(a.traces):
                raise FormulaScopeError(
                    f"atom {a.name!r} takes {atom_arity[a.name]} trace variable(s), got {len(a.traces)} in {a}"
                )
    return f


def parse_body(src: str) -> Body:
    """Parse a quantifier-free body (no scope checks)."""
    f = _Parser(src).formula()
    if f.prefix:
        raise FormulaSyntaxError("expected a quantifier-free body", 0, src)
    return f.body
