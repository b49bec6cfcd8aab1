import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperabc.automata import (TRUE, BuchiAutomaton, Edge, Guard, HoaError, RabinAutomaton, accepts_lasso_word,
                               enumerate_lassos, enumerate_lassos_rabin, equivalent, hoa_export, hoa_import,
                               is_deterministic, ltl_to_nba, pair_set, parse_guard, prune, run_count,
                               satisfiable, transition_pairs)
from hyperabc.formula import Atom, eval_on_lasso_traces, eval_on_lasso_word, negate_to_nnf, parse_body, parse_hyperltl
from hyperabc.pipeline import negated_automaton


def pair_guard(alphabet, x, y):
    """The label ``(x, y)``: letter x on the first trace, y on the second."""
    return parse_guard(f"{x}[p1] & {y}[p2]", alphabet)


def key_set(alphabet, pairs):
    out = set()
    for s_a, s_b in pairs:
        a = pair_guard(alphabet, *s_a)
        b = TRUE if s_b == "T" else pair_guard(alphabet, *s_b)
        out.add((a, b))
    return out


BRANCHING_LASSOS = {(0, 1, 5, 5): [("ab", "cd"), ("cd", "T")],
               (0, 2, 3, 5, 5): [("cd", "dc"), ("dc", "cd"), ("cd", "T")],
               (0, 2, 4, 5, 5): [("cd", "ab"), ("ab", "ba"), ("ba", "T")]}
FORKED_LASSOS = {(0, 1, 2, 5, 5): [("ab", "ba"), ("ba", "ac"), ("ac", "T")],
               (0, 3, 4, 5, 5): [("ab", "ba"), ("ba", "dc"), ("dc", "T")],
               (0, 3, 4, 2, 5, 5): [("ab", "ba"), ("ba", "cd"), ("cd", "ac"), ("ac", "T")]}


def check_figure(aut, expected):
    lassos = enumerate_lassos(aut)
    assert {l.states for l in lassos} == set(expected)
    for lasso in lassos:
        got = {tp.key for tp in pair_set(lasso)}
        assert got == key_set(aut.alphabet, expected[lasso.states])
        assert len(pair_set(lasso)) == len(expected[lasso.states])


def g_atom_automaton():
    a = Atom("a", ("p",))
    return BuchiAutomaton((0,), 0, (Edge(0, 0, Guard.literal(a)),), {0})


# -- lassos and pairs ---------------------------------------------------------

def test_branching_lassos_and_pairs(branching):
    check_figure(branching, BRANCHING_LASSOS)


def test_forked_lassos_and_pairs(forked):
    check_figure(forked, FORKED_LASSOS)


def test_branching_r2_pair_order(branching):
    r2 = next(l for l in enumerate_lassos(branching) if l.states == (0, 2, 3, 5, 5))
    tps = transition_pairs(r2)
    assert [tp.states for tp in tps] == [(0, 2, 3), (2, 3, 5), (3, 5, 5)]


def test_true_loop_lasso_has_empty_stem():
    aut = BuchiAutomaton((0,), 0, (Edge(0, 0, TRUE),), {0})
    (lasso,) = enumerate_lassos(aut)
    assert lasso.stem == () and lasso.states == (0, 0)
    assert transition_pairs(lasso) == []


def test_self_loop_lasso_pairs_have_no_wrap():
    g = parse_guard("g[p]")
    aut = BuchiAutomaton((0, 1), 0, (Edge(0, 1, g), Edge(1, 1, TRUE)), {1})
    (lasso,) = enumerate_lassos(aut)
    assert [tp.key for tp in transition_pairs(lasso)] == [(g, TRUE)]


def test_wrap_pair_for_long_cycle():
    a, b = parse_guard("a[p]"), parse_guard("b[p]")
    aut = BuchiAutomaton((0, 1), 0, (Edge(0, 1, a), Edge(1, 0, b)), {0})
    (lasso,) = enumerate_lassos(aut)
    assert [tp.key for tp in transition_pairs(lasso)] == [(a, b), (b, a)]


# -- translation --------------------------------------------------------------

def test_globally_gives_one_state():
    aut = ltl_to_nba(parse_body("G a[p]"))
    assert aut.states == (0,)
    assert aut.accepting == {0}
    (e,) = aut.edges
    assert e.src == e.dst == 0 and e.guard == parse_guard("a[p]")


def test_false_gives_empty_automaton():
    assert ltl_to_nba(parse_body("a[p] & !a[p]")).is_empty
    assert ltl_to_nba(parse_body("false")).is_empty


def opacity_figure():
    al = parse_guard
    return BuchiAutomaton(
        (0, 1, 2), 0,
        (Edge(0, 1, al("a1[p1] & a2[p2] & a3[p1,p2]")),
         Edge(0, 2, al("(a1[p1] & !a2[p2]) | (a1[p1] & !a3[p1,p2])")),
         Edge(1, 1, al("a3[p1,p2]")), Edge(1, 2, al("!a3[p1,p2]")), Edge(2, 2, TRUE)),
        {2})


def robustness_figure():
    al = parse_guard
    return BuchiAutomaton(
        (0, 1, 2), 0,
        (Edge(0, 1, al("a3[p1] & a4[p2]")), Edge(1, 1, al("a1[p1] & a1[p2]")),
         Edge(1, 2, al("!a1[p1] | !a1[p2]")), Edge(2, 2, TRUE)),
        {2})


def test_opacity_negation_matches_hand_automaton():
    body = parse_hyperltl("forall p1. exists p2. a1[p1] -> (a2[p2] & G a3[p1,p2])").body
    aut = ltl_to_nba(negate_to_nnf(body))
    hand = opacity_figure()
    atoms_ = [Atom("a1", ("p1",)), Atom("a2", ("p2",)), Atom("a3", ("p1", "p2"))]
    rng = random.Random(5)
    for _ in range(300):
        n = rng.randint(1, 6)
        k = rng.randint(0, n - 1)
        word = [{a for a in atoms_ if rng.random() < 0.5} for _ in range(n)]
        assert accepts_lasso_word(aut, word[:k], word[k:]) == accepts_lasso_word(hand, word[:k], word[k:])


def test_robustness_negation_matches_hand_automaton(room):
    aut = negated_automaton(room)
    hand = robustness_figure()
    assert is_deterministic(aut)
    # inside the state space T = 21 and T in [20.5, 21.5] both imply T in [20, 25]
    a1 = {t: Atom("a1", (t,)) for t in ("p1", "p2")}
    a3, a4 = Atom("a3", ("p1",)), Atom("a4", ("p2",))
    rng = random.Random(9)
    checked = 0
    for _ in range(400):
        n = rng.randint(1, 6)
        k = rng.randint(0, n - 1)
        word = []
        for _ in range(n):
            letter = {a for a in (a1["p1"], a1["p2"], a3, a4) if rng.random() < 0.6}
            if a3 in letter:
                letter.add(a1["p1"])
            if a4 in letter:
                letter.add(a1["p2"])
            word.append(letter)
        checked += 1
        assert accepts_lasso_word(aut, word[:k], word[k:]) == accepts_lasso_word(hand, word[:k], word[k:])
    assert checked == 400


# -- HOA ----------------------------------------------------------------------

def as_graph(aut):
    g = nx.MultiDiGraph()
    for q in aut.states:
        g.add_node(q, acc=q in aut.accepting, init=q == aut.initial)
    for e in aut.edges:
        g.add_edge(e.src, e.dst, guard=str(e.guard))
    return g


def test_hoa_round_trip_is_isomorphic(branching):
    again = hoa_import(hoa_export(branching))
    assert nx.is_isomorphic(as_graph(branching), as_graph(again),
                            node_match=lambda a, b: a == b,
                            edge_match=lambda a, b: sorted(d["guard"] for d in a.values()) == sorted(d["guard"] for d in b.values()))
    assert again.edges == branching.edges
    assert again.alphabet == branching.alphabet


def test_hoa_one_state_true_loop():
    text = "HOA: v1\nStates: 1\nStart: 0\nAP: 0\nacc-name: Buchi\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0 {0}\n[t] 0\n--END--\n"
    aut = hoa_import(text)
    assert isinstance(aut, BuchiAutomaton) and aut.accepting == {0}
    assert aut.edges == (Edge(0, 0, TRUE),)


RABIN_H1 = """HOA: v1
States: 2
Start: 0
AP: 1 "g[p]"
acc-name: Rabin 1
Acceptance: 2 Fin(0)&Inf(1)
--BODY--
State: 0
[0] 1
[!0] 0
State: 1 {1}
[0] 1
[!0] 0
--END--
"""


def test_hoa_rabin_single_pair():
    aut = hoa_import(RABIN_H1)
    assert isinstance(aut, RabinAutomaton)
    assert aut.pairs == ((frozenset({1}), frozenset()),)
    again = hoa_import(hoa_export(aut))
    assert isinstance(again, RabinAutomaton) and again.pairs == aut.pairs


def test_hoa_errors():
    bad_acc = "HOA: v1\nStates: 1\nStart: 0\nAP: 0\nacc-name: parity min even 2\nAcceptance: 2 Inf(0)|Fin(1)\n--BODY--\n--END--\n"
    with pytest.raises(HoaError):
        hoa_import(bad_acc)
    unknown = 'HOA: v1\nStates: 1\nStart: 0\nAP: 1 "x y"\nacc-name: Buchi\nAcceptance: 1 Inf(0)\n--BODY--\n--END--\n'
    with pytest.raises(HoaError, match="unknown atomic proposition"):
        hoa_import(unknown)
    with pytest.raises(HoaError):
        hoa_import("States: 1\n--BODY--\n--END--\n")


# -- pruning and determinism --------------------------------------------------

def test_prune_keeps_branching(branching):
    assert prune(branching) == branching


def test_prune_removes_unreachable_accepting():
    aut = BuchiAutomaton((0, 1, 2), 0, (Edge(0, 0, TRUE), Edge(2, 1, TRUE), Edge(1, 1, TRUE)), {0, 1})
    assert prune(aut).states == (0,)


def test_prune_chain_without_cycle_is_empty():
    a = parse_guard("a[p]")
    aut = BuchiAutomaton((0, 1, 2), 0, (Edge(0, 1, a), Edge(1, 2, a)), {2})
    assert prune(aut).is_empty


def test_prune_idempotent_and_lasso_preserving(branching, forked):
    extra = BuchiAutomaton(branching.states + (6, 7), 0,
                           branching.edges + (Edge(0, 6, TRUE), Edge(7, 5, TRUE)), branching.accepting, branching.alphabet)
    once = prune(extra)
    assert prune(once) == once
    assert {l.states for l in enumerate_lassos(once)} == {l.states for l in enumerate_lassos(extra)}
    assert prune(forked) == forked


def test_determinism_examples(forked, room):
    assert not is_deterministic(forked)
    assert is_deterministic(negated_automaton(room))
    assert is_deterministic(BuchiAutomaton((0,), 0, (Edge(0, 0, TRUE),), {0}))


def test_g_automaton_membership():
    aut = g_atom_automaton()
    a = Atom("a", ("p",))
    assert accepts_lasso_word(aut, [], [{a}])
    assert not accepts_lasso_word(aut, [], [set()])


# -- Rabin lassos -------------------------------------------------------------

def test_rabin_one_pair_one_lasso():
    aut = RabinAutomaton((0, 1), 0, (Edge(0, 1, TRUE), Edge(1, 1, TRUE)), frozenset(),
                         pairs=((frozenset({1}), frozenset()),))
    lassos = enumerate_lassos_rabin(aut)
    assert [(l.states, l.pair_index) for l in lassos] == [((0, 1, 1), 0)]


def test_rabin_good_state_without_cycle():
    aut = RabinAutomaton((0, 1), 0, (Edge(0, 1, TRUE),), frozenset(), pairs=((frozenset({1}), frozenset()),))
    assert enumerate_lassos_rabin(aut) == []


DRA4 = RabinAutomaton(
    (0, 1, 2, 3), 0,
    (Edge(0, 1, parse_guard("a[p]")), Edge(0, 2, parse_guard("!a[p]")),
     Edge(1, 3, parse_guard("b[p]")), Edge(1, 1, parse_guard("!b[p]")),
     Edge(2, 3, TRUE), Edge(3, 1, parse_guard("a[p]")), Edge(3, 2, parse_guard("!a[p]"))),
    frozenset(),
    pairs=((frozenset({1}), frozenset({2})), (frozenset({1, 3}), frozenset())))


def brute_force_lassos(aut):
    """Every (simple path q0 -> g, simple cycle through g) by exhaustive permutation search."""
    succ = {}
    for e in aut.edges:
        succ.setdefault((e.src, e.dst), []).append(e)
    out = set()
    states = aut.states
    for j, (good, _bad) in enumerate(aut.pairs):
        for g in good:
            others = [q for q in states if q not in (aut.initial, g)]
            stems = [()] if g == aut.initial else []
            if g != aut.initial:
                for r in range(len(others) + 1):
                    for mid in itertools.permutations(others, r):
                        path = (aut.initial,) + mid + (g,)
                        if all((a, b) in succ for a, b in zip(path, path[1:])):
                            stems.append(path[1:])
            cyc_others = [q for q in states if q != g]
            cycles = []
            for r in range(len(cyc_others) + 1):
                for mid in itertools.permutations(cyc_others, r):
                    path = (g,) + mid + (g,)
                    if all((a, b) in succ for a, b in zip(path, path[1:])):
                        cycles.append(path[1:])
            for s in stems:
                for c in cycles:
                    out.add(((aut.initial,) + s + c, j))
    return out


def test_rabin_lassos_match_brute_force():
    assert is_deterministic(DRA4)
    got = {(l.states, l.pair_index) for l in enumerate_lassos_rabin(DRA4)}
    assert got == brute_force_lassos(DRA4)
    # the cycle 1 -> 1 is listed once per pair index
    assert {j for states, j in got if states == (0, 1, 1)} == {0, 1}


# -- properties ---------------------------------------------------------------

ATOMS = [Atom("a", ("p",)), Atom("b", ("p",)), Atom("c", ("q",))]


def bodies(depth):
    leaves = st.sampled_from([f"{a.name}[{a.traces[0]}]" for a in ATOMS] + ["true", "false"])
    if depth == 0:
        return leaves
    sub = bodies(depth - 1)
    return st.one_of(
        leaves,
        st.builds(lambda op, x: f"{op}({x})", st.sampled_from(["!", "X", "G", "F"]), sub),
        st.builds(lambda op, x, y: f"({x}) {op} ({y})", st.sampled_from(["&", "|", "->", "U", "R"]), sub, sub),
    )


letters = st.frozensets(st.sampled_from(ATOMS))


@settings(max_examples=60, deadline=None)
@given(bodies(3), st.lists(st.tuples(st.lists(letters, max_size=3), st.lists(letters, min_size=1, max_size=3)),
                           min_size=1, max_size=4))
def test_lasso_guards_spell_accepted_words(src, words):
    aut = ltl_to_nba(parse_body(src))
    for lasso in enumerate_lassos(aut):
        stem = [pick_letter(g) for g in lasso.stem_guards]
        cycle = [pick_letter(g) for g in lasso.cycle_guards]
        assert accepts_lasso_word(aut, stem, cycle)


def pick_letter(guard):
    cube = min(guard.cubes, key=lambda c: sorted(map(str, c)))
    return {a for a, v in cube if v}


@settings(max_examples=60, deadline=None)
@given(bodies(3), st.lists(st.lists(letters, min_size=1, max_size=6), min_size=1, max_size=5))
def test_determinism_means_single_run(src, words):
    aut = ltl_to_nba(parse_body(src))
    if aut.is_empty or not is_deterministic(aut):
        return
    for w in words:
        assert run_count(aut, w) <= 1


def test_guard_algebra():
    a, b = parse_guard("a[p]"), parse_guard("b[p]")
    assert equivalent(a.neg().neg(), a)
    assert not satisfiable(a.conj(a.neg()))
    assert equivalent((a | b).neg(), a.neg() & b.neg())


def test_two_trace_acceptance_matches_trace_semantics():
    a, b = Atom("a", ("p",)), Atom("b", ("q",))
    project = lambda letters, t: [{x.name for x in letter if x.traces == (t,)} for letter in letters]
    rng = random.Random(17)
    for _ in range(200):
        body = parse_body(rng.choice(["G (a[p] -> F b[q])", "a[p] U b[q]", "F G !a[p] | X b[q]",
                                      "(a[p] & b[q]) R !a[p]"]))
        aut = ltl_to_nba(body)
        n = rng.randint(1, 6)
        k = rng.randint(0, n - 1)
        word = [{x for x in (a, b) if rng.random() < 0.5} for _ in range(n)]
        traces = {t: (project(word[:k], t), project(word[k:], t)) for t in ("p", "q")}
        assert accepts_lasso_word(aut, word[:k], word[k:]) == eval_on_lasso_traces(body, traces)
