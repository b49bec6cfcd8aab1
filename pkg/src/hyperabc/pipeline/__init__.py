"""Problem specs, decomposition into conditional invariances, verification algorithms, reports and CLI."""

from .decompose import Decomposition, PairInfo, decompose, negated_automaton, semantic_prune
from .oracle import (BUDGET, NO_PAIR, NONDETERMINISTIC, SDP_INFEASIBLE, SOLVER_MISSING, OracleOutcome, SosOracle,
                     StubOracle)
from .problem import (AtomDecl, Options, ProblemSpec, ProblemSpecError, atom_region, bundled_path, bundled_problem,
                      guard_region, load_problem, schema)
from .report import AuditResult, VerificationReport, audit_report
from .search import Budget, candidate_selections, greedy_subset, selection_search
from .verify import (FragmentError, NondeterministicAutomatonError, choose_algorithm, forall_exists_search, run,
                     verify_forall_exists, verify_general, verify_rabin)

__all__ = [
    "AtomDecl", "AuditResult", "BUDGET", "Budget", "Decomposition", "FragmentError", "NONDETERMINISTIC", "NO_PAIR",
    "NondeterministicAutomatonError", "Options", "OracleOutcome", "PairInfo", "ProblemSpec", "ProblemSpecError",
    "SDP_INFEASIBLE", "SOLVER_MISSING", "SosOracle", "StubOracle", "VerificationReport", "atom_region",
    "audit_report", "bundled_path", "bundled_problem", "candidate_selections", "choose_algorithm", "decompose",
    "forall_exists_search", "greedy_subset", "guard_region", "load_problem", "negated_automaton", "run", "schema",
    "selection_search", "semantic_prune", "verify_forall_exists", "verify_general", "verify_rabin",
]
