"""Propositional edge guards over indexed atoms, kept in canonical DNF.

A guard is a set of cubes; a cube is a set of literals ``(atom, polarity)``.
``TRUE`` is the single empty cube and ``FALSE`` the empty set of cubes.
Inconsistent cubes are dropped and absorbed cubes removed, so equal guards
usually compare equal structurally; :func:`equivalent` is the exact test.

An :class:`Alphabet` may declare exclusivity groups: atoms of one group are
never true together (for example the letters ``a, b, c, d`` of one trace in
a hand-drawn automaton).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ..formula.parser import parse_body
from ..formula.syntax import (And, Atom, Body, Const, Eventually, Globally, Implies, Next, Not, Or,
                              Release, Until, atoms, walk)

Literal = tuple[Atom, bool]
Cube = frozenset  # of Literal


@dataclass(frozen=True)
class Alphabet:
    exclusive: tuple[frozenset, ...] = ()

    def consistent(self, cube: Cube) -> bool:
        pos = {a for a, v in cube if v}
        neg = {a for a, v in cube if not v}
        if pos & neg:
            return False
        return all(len(pos & group) <= 1 for group in self.exclusive)


PLAIN = Alphabet()


@dataclass(frozen=True)
class Guard:
    cubes: frozenset = field(default_factory=frozenset)

    # construction

    @staticmethod
    def of_cubes(cubes: Iterable[Iterable[Literal]], alphabet: Alphabet = PLAIN) -> "Guard":
        kept = []
        for c in cubes:
            c = frozenset(c)
            if alphabet.consistent(c):
                kept.append(c)
        kept = [c for c in kept if not any(o < c for o in kept)]
        return Guard(frozenset(kept))

    @staticmethod
    def literal(atom: Atom, positive: bool = True) -> "Guard":
        return Guard(frozenset({frozenset({(atom, positive)})}))

    # queries

    @property
    def is_true(self) -> bool:
        return frozenset() in self.cubes

    @property
    def is_false(self) -> bool:
        return not self.cubes

    def atoms(self) -> set[Atom]:
        return {a for c in self.cubes for a, _ in c}

    def eval(self, letter: Iterable[Atom]) -> bool:
        letter = set(letter)
        return any(all((a in letter) == v for a, v in c) for c in self.cubes)

    # boolean algebra

    def conj(self, other: "Guard", alphabet: Alphabet = PLAIN) -> "Guard":
        return Guard.of_cubes((a | b for a, b in itertools.product(self.cubes, other.cubes)), alphabet)

    def disj(self, other: "Guard", alphabet: Alphabet = PLAIN) -> "Guard":
        return Guard.of_cubes(self.cubes | other.cubes, alphabet)

    def neg(self, alphabet: Alphabet = PLAIN) -> "Guard":
        result = TRUE
        for cube in self.cubes:
            clause = Guard.of_cubes(([(a, not v)] for a, v in cube), alphabet)
            result = result.conj(clause, alphabet)
            if result.is_false:
                break
        return result

    def __and__(self, other):
        return self.conj(other)

    def __or__(self, other):
        return self.disj(other)

    def __invert__(self):
        return self.neg()

    def sort_key(self):
        return to_text(self)

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"Guard({to_text(self)!r})"


TRUE = Guard(frozenset({frozenset()}))
FALSE = Guard(frozenset())


def satisfiable(g: Guard, alphabet: Alphabet = PLAIN) -> bool:
    return not Guard.of_cubes(g.cubes, alphabet).is_false


def implies(a: Guard, b: Guard, alphabet: Alphabet = PLAIN) -> bool:
    return not satisfiable(a.conj(b.neg(alphabet), alphabet), alphabet)


def equivalent(a: Guard, b: Guard, alphabet: Alphabet = PLAIN) -> bool:
    return implies(a, b, alphabet) and implies(b, a, alphabet)


def disjoint(a: Guard, b: Guard, alphabet: Alphabet = PLAIN) -> bool:
    return not satisfiable(a.conj(b, alphabet), alphabet)


def _literal_text(lit: Literal) -> str:
    atom, v = lit
    return str(atom) if v else f"!{atom}"


def _cube_text(cube: Cube) -> str:
    lits = sorted(cube, key=lambda l: (l[0].traces, l[0].name, not l[1]))
    return " & ".join(_literal_text(l) for l in lits)


def to_text(g: Guard) -> str:
    if g.is_true:
        return "true"
    if g.is_false:
        return "false"
    cubes = sorted(_cube_text(c) for c in g.cubes)
    if len(cubes) == 1:
        return cubes[0]
    return " | ".join(f"({c})" if " & " in c else c for c in cubes)


def from_body(node: Body, alphabet: Alphabet = PLAIN) -> Guard:
    """Guard of a propositional formula body (no temporal operators)."""
    if isinstance(node, Const):
        return TRUE if node.value else FALSE
    if isinstance(node, Atom):
        return Guard.literal(node)
    if isinstance(node, Not):
        return from_body(node.arg, alphabet).neg(alphabet)
    if isinstance(node, And):
        return from_body(node.left, alphabet).conj(from_body(node.right, alphabet), alphabet)
    if isinstance(node, Or):
        return from_body(node.left, alphabet).disj(from_body(node.right, alphabet), alphabet)
    if isinstance(node, Implies):
        return from_body(node.left, alphabet).neg(alphabet).disj(from_body(node.right, alphabet), alphabet)
    raise ValueError(f"temporal operator in a guard: {node!r}")


def parse_guard(src: str, alphabet: Alphabet = PLAIN, atom_arity: Mapping[str, int] | None = None) -> Guard:
    """Parse ``a1[p1] & (!a2[p2] | !a3[p1,p2])`` style text."""
    body = parse_body(src)
    for n in walk(body):
        if isinstance(n, (Next, Until, Release, Globally, Eventually)):
            raise ValueError(f"guards must be propositional: {src!r}")
    if atom_arity is not None:
        for a in atoms(body):
            if atom_arity.get(a.name) != len(a.traces):
                raise ValueError(f"atom {a} does not match its declaration")
    return from_body(body, alphabet)


_ATOM_NAME = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\[([A-Za-z_][A-Za-z0-9_]*(?:,[A-Za-z_][A-Za-z0-9_]*)*)\]$")


def atom_from_name(name: str) -> Atom | None:
    m = _ATOM_NAME.match(name.replace(" ", ""))
    if not m:
        return None
    return Atom(m.group(1), tuple(m.group(2).split(",")))
