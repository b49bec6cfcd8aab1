"""LTL to Büchi translation by tableau expansion.

The body is rewritten to negation normal form over ``X, U, R, &, |``. Each
automaton state is a set of obligations. Expanding a state yields moves
``(literals, next obligations, postponed untils)``; a move belongs to the
acceptance set of an until ``u`` unless it postpones ``u``. The resulting
transition-based generalized Büchi automaton is degeneralized with a level
counter and then simplified.
"""

from __future__ import annotations

import itertools
from collections import deque
from functools import lru_cache

from ..formula.nnf import to_basis
from ..formula.syntax import FALSE, TRUE, And, Atom, Body, Const, Next, Not, Or, Release, Until, to_text, walk
from .buchi import (BuchiAutomaton, Edge, empty_automaton, merge_parallel_edges, prune,
                    quotient_bisimulation, renumber, restrict_to_sinks)
from .guards import PLAIN, Guard

Move = tuple[frozenset, frozenset, frozenset]  # literals, next obligations, postponed untils


def _combine(a: Move, b: Move) -> Move | None:
    lits = a[0] | b[0]
    if any((atom, not v) in lits for atom, v in lits):
        return None
    return lits, a[1] | b[1], a[2] | b[2]


def _product(xs: list[Move], ys: list[Move]) -> list[Move]:
    out = []
    for a, b in itertools.product(xs, ys):
        c = _combine(a, b)
        if c is not None and c not in out:
            out.append(c)
    return out


_EMPTY: Move = (frozenset(), frozenset(), frozenset())


@lru_cache(maxsize=None)
def _expand(node: Body) -> tuple[Move, ...]:
    if isinstance(node, Const):
        return (_EMPTY,) if node.value else ()
    if isinstance(node, Atom):
        return ((frozenset({(node, True)}), frozenset(), frozenset()),)
    if isinstance(node, Not):
        return ((frozenset({(node.arg, False)}), frozenset(), frozenset()),)
    if isinstance(node, Next):
        return ((frozenset(), frozenset({node.arg}), frozenset()),)
    if isinstance(node, And):
        return tuple(_product(list(_expand(node.left)), list(_expand(node.right))))
    if isinstance(node, Or):
        return tuple(dict.fromkeys(_expand(node.left) + _expand(node.right)))
    if isinstance(node, Until):
        wait = (frozenset(), frozenset({node}), frozenset({node}))
        later = [c for m in _expand(node.left) if (c := _combine(m, wait)) is not None]
        return tuple(dict.fromkeys(_expand(node.right) + tuple(later)))
    if isinstance(node, Release):
        now = _product(list(_expand(node.left)), list(_expand(node.right)))
        stay = (frozenset(), frozenset({node}), frozenset())
        later = [c for m in _expand(node.right) if (c := _combine(m, stay)) is not None]
        return tuple(dict.fromkeys(tuple(now) + tuple(later)))
    raise TypeError(f"unexpected node {node!r}; rewrite to the basis first")


def _expand_state(state: frozenset) -> list[Move]:
    moves = [_EMPTY]
    for f in sorted(state, key=to_text):
        moves = _product(moves, list(_expand(f)))
        if not moves:
            break
    return moves


def ltl_to_nba(body: Body, simplify: bool = True, restrict: bool = True) -> BuchiAutomaton:
    """Büchi automaton accepting exactly the words satisfying ``body``.

    With ``restrict`` the guards into a universal accepting sink are
    subtracted from sibling edges (language preserving, see
    :func:`restrict_to_sinks`).
    """
    phi = to_basis(body)
    if phi == FALSE:
        return empty_automaton()
    untils = sorted({n for n in walk(phi) if isinstance(n, Until)}, key=to_text)
    k = len(untils)

    start = (frozenset({phi}) if phi != TRUE else frozenset(), 0)
    index = {start: 0}
    todo = deque([start])
    edges: list[Edge] = []
    while todo:
        node = todo.popleft()
        state, level = node
        for lits, nxt, postponed in _expand_state(state):
            new_level = 0 if level == k else level
            while new_level < k and untils[new_level] not in postponed:
                new_level += 1
            target = (frozenset(nxt), new_level)
            if target not in index:
                index[target] = len(index)
                todo.append(target)
            edges.append(Edge(index[node], index[target], Guard.of_cubes([lits])))
    accepting = {i for (s, lvl), i in index.items() if lvl == k}
    aut = BuchiAutomaton(tuple(index.values()), 0, tuple(edges), frozenset(accepting), PLAIN,
                         aps=tuple(sorted({a for a, _ in _all_literals(edges)})))
    aut = prune(merge_parallel_edges(aut))
    if aut.is_empty:
        return aut
    if simplify:
        aut = quotient_bisimulation(aut)
        aut = merge_parallel_edges(aut)
    if restrict:
        aut = restrict_to_sinks(aut)
    return renumber(aut)


def _all_literals(edges):
    for e in edges:
        for cube in e.guard.cubes:
            yield from cube
