"""Büchi and Rabin automata with symbolic guards."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from ..formula.syntax import Atom
from .guards import FALSE, PLAIN, TRUE, Alphabet, Guard, disjoint, equivalent, satisfiable


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    guard: Guard

    def __str__(self):
        return f"{self.src} -[{self.guard}]-> {self.dst}"


@dataclass(frozen=True)
class BuchiAutomaton:
    states: tuple[int, ...]
    initial: int
    edges: tuple[Edge, ...]
    accepting: frozenset[int]
    alphabet: Alphabet = PLAIN
    names: tuple[tuple[int, str], ...] = ()
    aps: tuple[Atom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(sorted(set(self.states))))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: (e.src, e.dst, str(e.guard)))))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "aps", tuple(sorted(set(self.aps))))
        known = set(self.states)
        if self.states and self.initial not in known:
            raise ValueError(f"initial state {self.initial} is not a state")
        for e in self.edges:
            if e.src not in known or e.dst not in known:
                raise ValueError(f"edge {e} leaves the state set")
        if not self.accepting <= known:
            raise ValueError("accepting states must be states")

    @property
    def is_empty(self) -> bool:
        return not self.states

    def name(self, q: int) -> str:
        return dict(self.names).get(q, f"q{q}")

    def out(self, q: int) -> list[Edge]:
        return [e for e in self.edges if e.src == q]

    def successors(self, q: int) -> set[int]:
        return {e.dst for e in self.edges if e.src == q}

    def all_atoms(self) -> set[Atom]:
        found = set(self.aps)
        for e in self.edges:
            found |= e.guard.atoms()
        return found

    def with_edges(self, edges: Iterable[Edge]) -> "BuchiAutomaton":
        return replace(self, edges=tuple(edges))

    def accepting_sets(self) -> list[tuple[frozenset, frozenset]]:
        """Rabin-style view: one pair (F, ∅)."""
        return [(self.accepting, frozenset())]


@dataclass(frozen=True)
class RabinAutomaton(BuchiAutomaton):
    """``accepting`` is unused; ``pairs`` holds the Rabin pairs (G_j, B_j).

    A run is accepting if for some j it visits G_j infinitely often and B_j
    only finitely often.
    """

    pairs: tuple[tuple[frozenset, frozenset], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((frozenset(g), frozenset(b)) for g, b in self.pairs))
        object.__setattr__(self, "accepting", frozenset().union(*(g for g, _ in self.pairs)) if self.pairs else frozenset())
        super().__post_init__()

    def accepting_sets(self):
        return list(self.pairs)


def empty_automaton(alphabet: Alphabet = PLAIN) -> BuchiAutomaton:
    return BuchiAutomaton((), 0, (), frozenset(), alphabet)


def _reachable(start: Iterable[int], succ) -> set[int]:
    seen = set(start)
    todo = deque(seen)
    while todo:
        q = todo.popleft()
        for r in succ(q):
            if r not in seen:
                seen.add(r)
                todo.append(r)
    return seen


def _graph(aut: BuchiAutomaton, live_edges: Sequence[Edge] | None = None):
    fwd, bwd = defaultdict(set), defaultdict(set)
    for e in live_edges if live_edges is not None else aut.edges:
        fwd[e.src].add(e.dst)
        bwd[e.dst].add(e.src)
    return fwd, bwd


def prune(aut: BuchiAutomaton) -> BuchiAutomaton:
    """Keep only states that lie on some lasso, and edges between them.

    Edges with unsatisfiable guards are dropped first. The result is empty
    when no accepting cycle is reachable.
    """
    edges = [e for e in aut.edges if satisfiable(e.guard, aut.alphabet)]
    live = _lasso_states(aut, edges, [(g, b) for g, b in aut.accepting_sets()])
    if aut.initial not in live:
        return _emptied(aut)
    keep_edges = [e for e in edges if e.src in live and e.dst in live]
    names = tuple((q, n) for q, n in aut.names if q in live)
    if isinstance(aut, RabinAutomaton):
        pairs = tuple((g & live, b & live) for g, b in aut.pairs)
        return replace(aut, states=tuple(sorted(live)), edges=tuple(keep_edges), names=names, pairs=pairs)
    return replace(aut, states=tuple(sorted(live)), edges=tuple(keep_edges),
                   accepting=aut.accepting & live, names=names)


def _emptied(aut):
    if isinstance(aut, RabinAutomaton):
        return replace(aut, states=(), edges=(), names=(), pairs=())
    return replace(aut, states=(), edges=(), accepting=frozenset(), names=())


def _lasso_states(aut: BuchiAutomaton, edges, pairs) -> set[int]:
    """States reachable from q0 that can reach a cycle through some state of a G set."""
    if not aut.states:
        return set()
    fwd, bwd = _graph(aut, edges)
    reach = _reachable([aut.initial], lambda q: fwd[q])
    live = set()
    for g, _bad in pairs:
        for a in g & reach:
            if a in _reachable(fwd[a], lambda q: fwd[q]):
                live |= reach & _reachable([a], lambda q: bwd[q])
    return live


def is_deterministic(aut: BuchiAutomaton) -> bool:
    for q in aut.states:
        outs = aut.out(q)
        for i in range(len(outs)):
            for j in range(i + 1, len(outs)):
                if not disjoint(outs[i].guard, outs[j].guard, aut.alphabet):
                    return False
    return True


def nondeterministic_states(aut: BuchiAutomaton) -> list[int]:
    bad = []
    for q in aut.states:
        outs = aut.out(q)
        if any(not disjoint(a.guard, b.guard, aut.alphabet) for i, a in enumerate(outs) for b in outs[i + 1:]):
            bad.append(q)
    return bad


def merge_parallel_edges(aut: BuchiAutomaton) -> BuchiAutomaton:
    merged: dict[tuple[int, int], Guard] = {}
    for e in aut.edges:
        key = (e.src, e.dst)
        merged[key] = merged[key].disj(e.guard, aut.alphabet) if key in merged else e.guard
    return aut.with_edges(Edge(s, d, g) for (s, d), g in merged.items() if not g.is_false)


def renumber(aut: BuchiAutomaton) -> BuchiAutomaton:
    """Breadth-first renumbering from the initial state (0, 1, 2, ...)."""
    if aut.is_empty:
        return aut
    order = [aut.initial]
    seen = {aut.initial}
    todo = deque(order)
    while todo:
        q = todo.popleft()
        for e in sorted(aut.out(q), key=lambda e: (e.dst in aut.accepting, str(e.guard))):
            if e.dst not in seen:
                seen.add(e.dst)
                order.append(e.dst)
                todo.append(e.dst)
    order += [q for q in aut.states if q not in seen]
    m = {q: i for i, q in enumerate(order)}
    names = tuple((m[q], n) for q, n in aut.names)
    edges = tuple(Edge(m[e.src], m[e.dst], e.guard) for e in aut.edges)
    if isinstance(aut, RabinAutomaton):
        pairs = tuple((frozenset(m[q] for q in g), frozenset(m[q] for q in b)) for g, b in aut.pairs)
        return replace(aut, states=tuple(range(len(order))), initial=0, edges=edges, names=names, pairs=pairs)
    return replace(aut, states=tuple(range(len(order))), initial=0, edges=edges,
                   accepting=frozenset(m[q] for q in aut.accepting), names=names)


def quotient_bisimulation(aut: BuchiAutomaton) -> BuchiAutomaton:
    """Merge states with the same acceptance flag and equivalent guarded moves into equal classes."""
    if aut.is_empty or isinstance(aut, RabinAutomaton):
        return aut
    block = {q: int(q in aut.accepting) for q in aut.states}
    while True:
        signatures: dict[int, tuple] = {}
        for q in aut.states:
            by_block: dict[int, Guard] = {}
            for e in aut.out(q):
                b = block[e.dst]
                by_block[b] = by_block[b].disj(e.guard, aut.alphabet) if b in by_block else e.guard
            signatures[q] = (block[q], frozenset((b, _canon(g, aut.alphabet)) for b, g in by_block.items()))
        ids: dict[tuple, int] = {}
        new_block = {}
        for q in aut.states:
            new_block[q] = ids.setdefault(signatures[q], len(ids))
        if len(set(new_block.values())) == len(set(block.values())):
            block = new_block
            break
        block = new_block
    rep = {}
    for q in aut.states:
        rep.setdefault(block[q], q)
    edges = {}
    for e in aut.edges:
        key = (rep[block[e.src]], rep[block[e.dst]])
        if e.src != key[0]:
            continue
        edges[key] = edges[key].disj(e.guard, aut.alphabet) if key in edges else e.guard
    states = sorted(set(rep.values()))
    names = tuple((q, n) for q, n in aut.names if q in states)
    return replace(aut, states=tuple(states), initial=rep[block[aut.initial]],
                   edges=tuple(Edge(s, d, g) for (s, d), g in edges.items()),
                   accepting=frozenset(q for q in states if q in aut.accepting), names=names)


def _canon(g: Guard, alphabet: Alphabet) -> Guard:
    """Canonical form by expansion to full minterms over the guard's atoms (small guards only)."""
    atoms_ = sorted(g.atoms())
    if len(atoms_) > 12:
        return g
    minterms = []
    for bits in range(1 << len(atoms_)):
        letter = {a for i, a in enumerate(atoms_) if bits >> i & 1}
        if g.eval(letter):
            minterms.append(frozenset((a, a in letter) for a in atoms_))
    return Guard.of_cubes(minterms, alphabet)


def universal_sinks(aut: BuchiAutomaton) -> set[int]:
    """Accepting states with a self-loop guarded by ``true`` (every continuation is accepted)."""
    out = set()
    for q in aut.accepting:
        for e in aut.out(q):
            if e.dst == q and equivalent(e.guard, TRUE, aut.alphabet):
                out.add(q)
    return out


def restrict_to_sinks(aut: BuchiAutomaton) -> BuchiAutomaton:
    """Strengthen guards ``g`` to ``g & !g_u`` where ``g_u`` leads to a universal sink.

    Words readable along the removed part are accepted through the sink
    anyway, so the language is unchanged; the result is often deterministic.
    """
    sinks = universal_sinks(aut)
    if not sinks or isinstance(aut, RabinAutomaton):
        return aut
    edges = []
    for q in aut.states:
        outs = aut.out(q)
        to_sink = FALSE
        for e in outs:
            if e.dst in sinks and e.dst != q:
                to_sink = to_sink.disj(e.guard, aut.alphabet)
        blocked = to_sink.neg(aut.alphabet)
        for e in outs:
            if to_sink.is_false or e.dst in sinks:
                edges.append(e)
            else:
                g = e.guard.conj(blocked, aut.alphabet)
                if not g.is_false:
                    edges.append(Edge(e.src, e.dst, g))
    return prune(aut.with_edges(edges))


def accepts_lasso_word(aut: BuchiAutomaton, stem: Sequence[Iterable[Atom]], cycle: Sequence[Iterable[Atom]]) -> bool:
    """Membership of the ultimately periodic word ``stem cycle^ω``."""
    if aut.is_empty:
        return False
    if not cycle:
        raise ValueError("the cycle of a lasso word must be nonempty")
    letters = [frozenset(x) for x in stem] + [frozenset(x) for x in cycle]
    n, loop = len(letters), len(stem)
    nxt = [i + 1 if i + 1 < n else loop for i in range(n)]
    out_edges = {q: aut.out(q) for q in aut.states}

    def succ(node):
        q, i = node
        return [(e.dst, nxt[i]) for e in out_edges[q] if e.guard.eval(letters[i])]

    reach = _reachable([(aut.initial, 0)], succ)
    for good, bad in aut.accepting_sets():
        allowed = {v for v in reach if v[0] not in bad}
        for scc in _sccs(allowed, lambda v: [w for w in succ(v) if w in allowed]):
            nontrivial = len(scc) > 1 or any(w in scc for w in succ(next(iter(scc))))
            if nontrivial and any(v[0] in good for v in scc):
                return True
    return False


def _sccs(nodes: set, succ) -> list[set]:
    """Tarjan's algorithm, iterative."""
    index, low, on_stack, stack, out = {}, {}, set(), [], []
    counter = 0
    for root in sorted(nodes):
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def run_count(aut: BuchiAutomaton, letters: Sequence[Iterable[Atom]]) -> int:
    """Number of runs on a finite prefix (used to sanity-check determinism)."""
    counts = {aut.initial: 1}
    for letter in letters:
        letter = frozenset(letter)
        nxt: dict[int, int] = defaultdict(int)
        for q, c in counts.items():
            for e in aut.out(q):
                if e.guard.eval(letter):
                    nxt[e.dst] += c
        counts = nxt
    return sum(counts.values())
