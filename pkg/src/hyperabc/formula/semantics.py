"""Exact LTL evaluation on ultimately periodic words.

A lasso word is ``stem`` followed by ``cycle`` repeated forever. Each letter
is a set of :class:`Atom` values that hold at that position. Positions
``0 .. len(stem)+len(cycle)-1`` cover every distinct suffix, so temporal
operators are computed as fixpoints over that finite set.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

from .syntax import (And, Atom, Body, Const, Eventually, Globally, Implies, Next, Not, Or, Release,
                     Until, atoms)

Letter = frozenset  # of Atom


class AlphabetMismatch(ValueError):
    pass


def eval_on_lasso_word(body: Body, stem: Sequence[set], cycle: Sequence[set]) -> bool:
    if not cycle:
        raise ValueError("the cycle of a lasso word must be nonempty")
    letters = [frozenset(x) for x in stem] + [frozenset(x) for x in cycle]
    n = len(letters)
    loop = len(stem)
    succ = [i + 1 if i + 1 < n else loop for i in range(n)]
    return _eval(body, letters, succ, {})[0]


def _eval(node: Body, letters, succ, memo) -> list[bool]:
    if node in memo:
        return memo[node]
    n = len(letters)
    if isinstance(node, Const):
        out = [node.value] * n
    elif isinstance(node, Atom):
        out = [node in letter for letter in letters]
    elif isinstance(node, Not):
        out = [not v for v in _eval(node.arg, letters, succ, memo)]
    elif isinstance(node, And):
        a, b = _eval(node.left, letters, succ, memo), _eval(node.right, letters, succ, memo)
        out = [x and y for x, y in zip(a, b)]
    elif isinstance(node, Or):
        a, b = _eval(node.left, letters, succ, memo), _eval(node.right, letters, succ, memo)
        out = [x or y for x, y in zip(a, b)]
    elif isinstance(node, Implies):
        a, b = _eval(node.left, letters, succ, memo), _eval(node.right, letters, succ, memo)
        out = [(not x) or y for x, y in zip(a, b)]
    elif isinstance(node, Next):
        a = _eval(node.arg, letters, succ, memo)
        out = [a[succ[i]] for i in range(n)]
    elif isinstance(node, (Until, Eventually)):
        if isinstance(node, Until):
            a, b = _eval(node.left, letters, succ, memo), _eval(node.right, letters, succ, memo)
        else:
            a, b = [True] * n, _eval(node.arg, letters, succ, memo)
        out = _fixpoint(lambda i, v: b[i] or (a[i] and v[succ[i]]), n, start=False)
    elif isinstance(node, (Release, Globally)):
        if isinstance(node, Release):
            a, b = _eval(node.left, letters, succ, memo), _eval(node.right, letters, succ, memo)
        else:
            a, b = [False] * n, _eval(node.arg, letters, succ, memo)
        out = _fixpoint(lambda i, v: b[i] and (a[i] or v[succ[i]]), n, start=True)
    else:
        raise TypeError(f"not a formula node: {node!r}")
    memo[node] = out
    return out


def _fixpoint(update, n: int, start: bool) -> list[bool]:
    v = [start] * n
    changed = True
    while changed:
        changed = False
        for i in reversed(range(n)):
            new = update(i, v)
            if new != v[i]:
                v[i] = new
                changed = True
    return v


def zip_traces(traces: Mapping[str, tuple[Sequence[set], Sequence[set]]]) -> tuple[list[frozenset], list[frozenset]]:
    """Zip per-trace lasso words into one word over indexed single-trace atoms.

    ``traces`` maps each trace variable to ``(stem, cycle)`` whose letters are
    sets of atom names.
    """
    if not traces:
        raise ValueError("need at least one trace")
    stem_len = max(len(s) for s, _ in traces.values())
    period = math.lcm(*(len(c) for _, c in traces.values()))
    if period == 0:
        raise ValueError("every trace needs a nonempty cycle")

    def letter(stem, cycle, k):
        return stem[k] if k < len(stem) else cycle[(k - len(stem)) % len(cycle)]

    def zipped(k):
        out = set()
        for tv, (stem, cycle) in traces.items():
            out.update(Atom(name, (tv,)) for name in letter(stem, cycle, k))
        return frozenset(out)

    return [zipped(k) for k in range(stem_len)], [zipped(stem_len + k) for k in range(period)]


def eval_on_lasso_traces(body: Body, traces: Mapping[str, tuple[Sequence[set], Sequence[set]]]) -> bool:
    """Evaluate a quantifier-free body on ``p`` ultimately periodic traces (single-trace atoms only)."""
    for a in atoms(body):
        if len(a.traces) != 1:
            raise AlphabetMismatch(f"joint atom {a} has no per-trace valuation; use eval_on_lasso_word")
        if a.traces[0] not in traces:
            raise AlphabetMismatch(f"no trace supplied for {a.traces[0]!r}")
    stem, cycle = zip_traces(traces)
    return eval_on_lasso_word(body, stem, cycle)
