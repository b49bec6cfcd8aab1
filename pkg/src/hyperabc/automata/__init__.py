"""Symbolic-guard Büchi and Rabin automata: translation, HOA, lassos and transition pairs."""

from .buchi import (BuchiAutomaton, Edge, RabinAutomaton, accepts_lasso_word, empty_automaton,
                    is_deterministic, merge_parallel_edges, nondeterministic_states, prune,
                    quotient_bisimulation, renumber, restrict_to_sinks, run_count, universal_sinks)
from .guards import (FALSE, PLAIN, TRUE, Alphabet, Guard, atom_from_name, disjoint, equivalent,
                     from_body, implies, parse_guard, satisfiable)
from .hoa import HoaError, hoa_export, hoa_import
from .lassos import Lasso, TransitionPair, enumerate_lassos, enumerate_lassos_rabin, pair_set, transition_pairs
from .translate import ltl_to_nba

__all__ = [
    "FALSE", "PLAIN", "TRUE", "Alphabet", "BuchiAutomaton", "Edge", "Guard", "HoaError", "Lasso",
    "RabinAutomaton", "TransitionPair", "accepts_lasso_word", "atom_from_name", "disjoint", "empty_automaton",
    "enumerate_lassos", "enumerate_lassos_rabin", "equivalent", "from_body", "hoa_export", "hoa_import",
    "implies", "is_deterministic", "ltl_to_nba", "merge_parallel_edges", "nondeterministic_states",
    "pair_set", "parse_guard", "prune", "quotient_bisimulation", "renumber", "restrict_to_sinks",
    "run_count", "satisfiable", "transition_pairs", "universal_sinks",
]
