"""Negation normal form and rewriting into the {X, U, R, &, |, !atom} basis."""

from __future__ import annotations

from .syntax import (FALSE, TRUE, And, Atom, Body, Const, Eventually, Globally, Implies, Next, Not,
                     Or, Release, Until, children)


def nnf(node: Body) -> Body:
    """Push negations down to atoms. ``G``/``F`` are kept; ``->`` is eliminated."""
    if isinstance(node, (Atom, Const)):
        return node
    if isinstance(node, Not):
        return _negate(node.arg)
    if isinstance(node, Implies):
        return Or(_negate(node.left), nnf(node.right))
    if isinstance(node, And):
        return And(nnf(node.left), nnf(node.right))
    if isinstance(node, Or):
        return Or(nnf(node.left), nnf(node.right))
    if isinstance(node, Next):
        return Next(nnf(node.arg))
    if isinstance(node, Globally):
        return Globally(nnf(node.arg))
    if isinstance(node, Eventually):
        return Eventually(nnf(node.arg))
    if isinstance(node, Until):
        return Until(nnf(node.left), nnf(node.right))
    if isinstance(node, Release):
        return Release(nnf(node.left), nnf(node.right))
    raise TypeError(f"not a formula node: {node!r}")


def _negate(node: Body) -> Body:
    if isinstance(node, Atom):
        return Not(node)
    if isinstance(node, Const):
        return Const(not node.value)
    if isinstance(node, Not):
        return nnf(node.arg)
    if isinstance(node, Implies):
        return And(nnf(node.left), _negate(node.right))
    if isinstance(node, And):
        return Or(_negate(node.left), _negate(node.right))
    if isinstance(node, Or):
        return And(_negate(node.left), _negate(node.right))
    if isinstance(node, Next):
        return Next(_negate(node.arg))
    if isinstance(node, Globally):
        return Eventually(_negate(node.arg))
    if isinstance(node, Eventually):
        return Globally(_negate(node.arg))
    if isinstance(node, Until):
        return Release(_negate(node.left), _negate(node.right))
    if isinstance(node, Release):
        return Until(_negate(node.left), _negate(node.right))
    raise TypeError(f"not a formula node: {node!r}")


def negate_to_nnf(body: Body) -> Body:
    """NNF of ``!body``."""
    return _negate(body)


def is_nnf(node: Body) -> bool:
    if isinstance(node, Implies):
        return False
    if isinstance(node, Not):
        return isinstance(node.arg, Atom)
    return all(is_nnf(c) for c in children(node))


def to_basis(node: Body) -> Body:
    """Rewrite an NNF formula to ``X, U, R, &, |`` over literals, folding constants."""
    node = nnf(node)
    return _basis(node)


def _basis(node: Body) -> Body:
    if isinstance(node, (Atom, Const, Not)):
        return node
    if isinstance(node, Globally):
        return _mk_release(FALSE, _basis(node.arg))
    if isinstance(node, Eventually):
        return _mk_until(TRUE, _basis(node.arg))
    if isinstance(node, Next):
        inner = _basis(node.arg)
        return inner if isinstance(inner, Const) else Next(inner)
    if isinstance(node, And):
        return _mk_and(_basis(node.left), _basis(node.right))
    if isinstance(node, Or):
        return _mk_or(_basis(node.left), _basis(node.right))
    if isinstance(node, Until):
        return _mk_until(_basis(node.left), _basis(node.right))
    if isinstance(node, Release):
        return _mk_release(_basis(node.left), _basis(node.right))
    raise TypeError(f"unexpected node in NNF: {node!r}")


def _mk_and(a: Body, b: Body) -> Body:
    if a == FALSE or b == FALSE:
        return FALSE
    if a == TRUE:
        return b
    if b == TRUE or a == b:
        return a
    return And(a, b)


def _mk_or(a: Body, b: Body) -> Body:
    if a == TRUE or b == TRUE:
        return TRUE
    if a == FALSE:
        return b
    if b == FALSE or a == b:
        return a
    return Or(a, b)


def _mk_until(a: Body, b: Body) -> Body:
    if isinstance(b, Const):
        return b
    if a == FALSE:
        return b
    return Until(a, b)


def _mk_release(a: Body, b: Body) -> Body:
    if isinstance(b, Const):
        return b
    if a == TRUE:
        return b
    return Release(a, b)
