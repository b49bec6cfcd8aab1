"""Abstract syntax for HyperLTL formulas in prenex form."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True, order=True)
class Atom:
    """Atomic proposition applied to trace variables, e.g. ``a3[p1,p2]``."""

    name: str
    traces: tuple[str, ...]

    def __str__(self):
        return f"{self.name}[{','.join(self.traces)}]"


@dataclass(frozen=True)
class Const:
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


@dataclass(frozen=True)
class Not:
    arg: "Body"


@dataclass(frozen=True)
class And:
    left: "Body"
    right: "Body"


@dataclass(frozen=True)
class Or:
    left: "Body"
    right: "Body"


@dataclass(frozen=True)
class Implies:
    left: "Body"
    right: "Body"


@dataclass(frozen=True)
class Next:
    arg: "Body"


@dataclass(frozen=True)
class Until:
    left: "Body"
    right: "Body"


@dataclass(frozen=True)
class Release:
    left: "Body"
    right: "Body"


@dataclass(frozen=True)
class Globally:
    arg: "Body"


@dataclass(frozen=True)
class Eventually:
    arg: "Body"


Body = Union[Atom, Const, Not, And, Or, Implies, Next, Until, Release, Globally, Eventually]

TRUE = Const(True)
FALSE = Const(False)

UNARY = {Not: "!", Next: "X", Globally: "G", Eventually: "F"}
BINARY = {And: "&", Or: "|", Implies: "->", Until: "U", Release: "R"}


@dataclass(frozen=True)
class Quantifier:
    kind: str  # "forall" | "exists"
    trace: str

    def __post_init__(self):
        if self.kind not in ("forall", "exists"):
            raise ValueError(f"unknown quantifier {self.kind!r}")


@dataclass(frozen=True)
class HyperLTLFormula:
    prefix: tuple[Quantifier, ...]
    body: Body

    @property
    def trace_vars(self) -> tuple[str, ...]:
        return tuple(q.trace for q in self.prefix)

    def index_of(self, trace: str) -> int:
        """1-based position of ``trace`` in the prefix, i.e. its copy index."""
        return self.trace_vars.index(trace) + 1

    def __str__(self):
        head = "".join(f"{q.kind} {q.trace}. " for q in self.prefix)
        return head + to_text(self.body)


def children(node: Body) -> tuple[Body, ...]:
    if isinstance(node, (Atom, Const)):
        return ()
    if type(node) in UNARY:
        return (node.arg,)
    return (node.left, node.right)


def walk(node: Body) -> Iterator[Body]:
    yield node
    for c in children(node):
        yield from walk(c)


def atoms(node: Body) -> set[Atom]:
    return {n for n in walk(node) if isinstance(n, Atom)}


def depth(node: Body) -> int:
    """Operator depth; atoms and constants have depth 0."""
    kids = children(node)
    return 0 if not kids else 1 + max(depth(c) for c in kids)


def to_text(node: Body) -> str:
    """Fully parenthesised text that the parser reads back to the same tree."""
    if isinstance(node, (Atom, Const)):
        return str(node)
    if type(node) in UNARY:
        return f"{UNARY[type(node)]}({to_text(node.arg)})"
    return f"({to_text(node.left)} {BINARY[type(node)]} {to_text(node.right)})"
