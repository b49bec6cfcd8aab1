"""Lassos of an ω-automaton and their consecutive transition pairs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .buchi import BuchiAutomaton, Edge, RabinAutomaton, is_deterministic
from .guards import Guard


@dataclass(frozen=True)
class Lasso:
    """A simple path from the initial state to ``anchor`` plus a simple cycle through ``anchor``."""

    stem: tuple[Edge, ...]
    cycle: tuple[Edge, ...]
    initial: int
    pair_index: int | None = None

    @property
    def anchor(self) -> int:
        return self.cycle[0].src

    @property
    def stem_states(self) -> tuple[int, ...]:
        return (self.initial,) + tuple(e.dst for e in self.stem)

    @property
    def cycle_states(self) -> tuple[int, ...]:
        return (self.anchor,) + tuple(e.dst for e in self.cycle)

    @property
    def states(self) -> tuple[int, ...]:
        """Stem states followed by the cycle, e.g. ``(q0, q1, q5, q5)``."""
        return self.stem_states + self.cycle_states[1:]

    @property
    def stem_guards(self) -> tuple[Guard, ...]:
        return tuple(e.guard for e in self.stem)

    @property
    def cycle_guards(self) -> tuple[Guard, ...]:
        return tuple(e.guard for e in self.cycle)

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self.stem + self.cycle

    def sort_key(self):
        return (self.pair_index if self.pair_index is not None else -1, self.states,
                tuple(str(e.guard) for e in self.edges))

    def label(self, aut: BuchiAutomaton | None = None) -> str:
        name = aut.name if aut is not None else (lambda q: f"q{q}")
        return "(" + ", ".join(name(q) for q in self.states) + ")"


@dataclass(frozen=True)
class TransitionPair:
    s_a: Guard
    s_b: Guard
    lasso_id: int = field(default=-1, compare=False)
    position: int = field(default=-1, compare=False)
    states: tuple[int, int, int] = field(default=(), compare=False)
    edges: tuple[Edge, Edge] | tuple = field(default=(), compare=False)

    @property
    def key(self) -> tuple[Guard, Guard]:
        return (self.s_a, self.s_b)

    def __str__(self):
        return f"(({self.s_a}), ({self.s_b}))"


def _simple_paths(aut: BuchiAutomaton, src: int, dst: int) -> Iterator[tuple[Edge, ...]]:
    """Edge sequences of simple paths ``src -> dst`` (the empty path when ``src == dst``)."""
    out = {q: aut.out(q) for q in aut.states}

    def dfs(q, visited, path):
        if q == dst:
            yield tuple(path)
            return
        for e in out[q]:
            if e.dst not in visited:
                visited.add(e.dst)
                path.append(e)
                yield from dfs(e.dst, visited, path)
                path.pop()
                visited.discard(e.dst)

    yield from dfs(src, {src}, [])


def _simple_cycles_through(aut: BuchiAutomaton, a: int, avoid: frozenset = frozenset()) -> Iterator[tuple[Edge, ...]]:
    out = {q: [e for e in aut.out(q) if e.dst not in avoid] for q in aut.states}

    def dfs(q, visited, path):
        for e in out[q]:
            if e.dst == a:
                yield tuple(path + [e])
            elif e.dst not in visited:
                visited.add(e.dst)
                path.append(e)
                yield from dfs(e.dst, visited, path)
                path.pop()
                visited.discard(e.dst)

    if a in avoid:
        return
    yield from dfs(a, {a}, [])


def enumerate_lassos(aut: BuchiAutomaton) -> list[Lasso]:
    """All (simple stem, simple cycle) lassos through accepting states, sorted by state ids."""
    if aut.is_empty:
        return []
    found = []
    for a in sorted(aut.accepting):
        cycles = list(_simple_cycles_through(aut, a))
        if not cycles:
            continue
        for stem in _simple_paths(aut, aut.initial, a):
            for cycle in cycles:
                found.append(Lasso(stem, cycle, aut.initial))
    return sorted(set(found), key=Lasso.sort_key)


def enumerate_lassos_rabin(aut: RabinAutomaton) -> list[Lasso]:
    """Lassos whose cycle passes through a state of ``G_j``, tagged with ``j``.

    Only the "visit G_j" side of each pair is used; cycles are not required to
    avoid ``B_j`` (denying every such lasso is sufficient but may be more than
    needed).
    """
    if aut.is_empty:
        return []
    if not is_deterministic(aut):
        raise ValueError("Rabin lasso enumeration expects a deterministic automaton")
    found = []
    for j, (good, _bad) in enumerate(aut.pairs):
        for a in sorted(good):
            cycles = list(_simple_cycles_through(aut, a))
            for stem in _simple_paths(aut, aut.initial, a):
                for cycle in cycles:
                    found.append(Lasso(stem, cycle, aut.initial, pair_index=j))
    return sorted(set(found), key=Lasso.sort_key)


def transition_pairs(lasso: Lasso, lasso_id: int = -1) -> list[TransitionPair]:
    """Consecutive edge-guard pairs along ``stem ++ cycle``, plus the wrap pair for cycles of length >= 2."""
    edges = list(lasso.edges)
    steps = [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]
    if len(lasso.cycle) >= 2:
        steps.append((lasso.cycle[-1], lasso.cycle[0]))
    out = []
    for pos, (e1, e2) in enumerate(steps):
        out.append(TransitionPair(e1.guard, e2.guard, lasso_id, pos, (e1.src, e1.dst, e2.dst), (e1, e2)))
    return out


def pair_set(lasso: Lasso, lasso_id: int = -1) -> list[TransitionPair]:
    """Transition pairs with duplicates (same guards) removed, first occurrence kept."""
    seen, out = set(), []
    for tp in transition_pairs(lasso, lasso_id):
        if tp.key not in seen:
            seen.add(tp.key)
            out.append(tp)
    return out
