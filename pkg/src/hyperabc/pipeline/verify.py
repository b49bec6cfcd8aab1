"""Verification algorithms: common-certificate search and the forall-exists traversal."""

from __future__ import annotations

import time
from collections import deque

from ..automata import RabinAutomaton, is_deterministic, nondeterministic_states
from ..barrier import is_forall_exists
from .decompose import Decomposition, decompose, edge_steps
from .oracle import BUDGET, NO_PAIR, NONDETERMINISTIC, SDP_INFEASIBLE, SOLVER_MISSING, Oracle, SosOracle
from .problem import ProblemSpec
from .report import ReportBuilder, VerificationReport
from .search import Budget, greedy_subset, selection_search


class FragmentError(ValueError):
    """The formula is outside the fragment an algorithm handles."""


class NondeterministicAutomatonError(ValueError):
    def __init__(self, states):
        self.states = list(states)
        super().__init__(
            f"automaton is nondeterministic at state(s) {self.states}; per-lasso certificates are unsound here. "
            "Use the general algorithm or supply a deterministic automaton through automaton_override")


def _failure_cause(budget: Budget) -> str:
    if any(o.cause == SOLVER_MISSING for o in budget.log):
        return SOLVER_MISSING
    if budget.exhausted:
        return BUDGET
    return SDP_INFEASIBLE


def _start(spec: ProblemSpec, decomp: Decomposition | None, oracle: Oracle | None, algorithm: str):
    decomp = decomp or decompose(spec)
    oracle = oracle or SosOracle(decomp)
    return decomp, oracle, ReportBuilder(spec, decomp, algorithm)


def _trivial(rep: ReportBuilder, decomp: Decomposition) -> VerificationReport | None:
    if decomp.vacuous:
        rep.flag("vacuous: the automaton for the negated body accepts no word")
        return rep.finish("SATISFIED")
    if not decomp.open_lassos():
        rep.flag("every lasso is discharged by assumed-unreachable initial guards")
        return rep.finish("SATISFIED")
    return None


def verify_general(spec: ProblemSpec, oracle: Oracle | None = None,
                   decomp: Decomposition | None = None) -> VerificationReport:
    """One certificate common to a selection of one eligible pair per open lasso."""
    t0 = time.perf_counter()
    decomp, oracle, rep = _start(spec, decomp, oracle, "general")
    done = _trivial(rep, decomp)
    if done:
        return done
    open_ids = decomp.open_lassos()
    options = [decomp.eligible_pairs(i) for i in open_ids]
    blocked = [i for i, o in zip(open_ids, options) if not o]
    if blocked:
        for i in blocked:
            rep.cause(NO_PAIR, lasso=i, detail=f"no eligible transition pair on lasso {decomp.lassos[i].label(decomp.automaton)}")
        return rep.finish("INCONCLUSIVE", t0)
    budget = Budget(spec.options.selection_budget)
    sel = selection_search(options, oracle, budget)
    rep.record_calls(budget.log)
    if sel is None:
        rep.cause(_failure_cause(budget), detail=f"{budget.used} selection(s) tried")
        return rep.finish("INCONCLUSIVE", t0)
    cert = rep.certificate(oracle(sel))
    for i in open_ids:
        rep.deny(i, cert, [k for k in decomp.lasso_pairs[i] if k in sel])
    return rep.finish("SATISFIED", t0)


def forall_exists_search(decomp: Decomposition, oracle: Oracle, rep: ReportBuilder, budget: Budget) -> bool:
    """Breadth-first traversal denying lassos with per-state common certificates.

    Returns True once every lasso is denied or discharged.
    """
    aut = decomp.automaton
    bad = nondeterministic_states(aut)
    if bad:
        raise NondeterministicAutomatonError(bad)
    steps = [set(edge_steps(lasso)) for lasso in decomp.lassos]
    on_lasso = [{e for e in lasso.edges} for lasso in decomp.lassos]
    everything = set(range(len(decomp.lassos)))
    denied = set(decomp.discharged)

    def abc_find(r: int) -> set[int]:
        found: set[int] = set()
        for e in aut.out(r):
            candidates: list[int] = []
            hits: dict[int, set[int]] = {}
            for e2 in aut.out(e.dst):
                live = {i for i in everything - denied - found if (e, e2) in steps[i]}
                info = decomp.pair(e.guard, e2.guard)
                if not live or info is None or not info.eligible:
                    continue
                if info.id not in hits:
                    candidates.append(info.id)
                hits.setdefault(info.id, set()).update(live)
            if not candidates:
                continue
            sub = greedy_subset(candidates, oracle, budget)
            if sub is None:
                continue
            cert = rep.certificate(oracle(sub), state=r, edge=e)
            for k in sorted(sub):
                for i in sorted(hits[k]):
                    rep.deny(i, cert, [k])
                    found.add(i)
        return found

    visited = {aut.initial}
    frontier = deque([aut.initial])
    while frontier:
        r = frontier.popleft()
        denied |= abc_find(r)
        rep.visit(r)
        if denied >= everything:
            return True
        for e in aut.out(r):
            live = [i for i in everything - denied if e in on_lasso[i]]
            if live and e.dst not in visited:
                visited.add(e.dst)
                frontier.append(e.dst)
    return False


def verify_forall_exists(spec: ProblemSpec, oracle: Oracle | None = None,
                         decomp: Decomposition | None = None, algorithm: str = "forall_exists") -> VerificationReport:
    """Per-state certificates along a deterministic automaton (forall* exists* formulas)."""
    t0 = time.perf_counter()
    if not is_forall_exists(spec.prefix):
        raise FragmentError(f"prefix {list(spec.prefix)} is not of the form forall* exists*")
    decomp, oracle, rep = _start(spec, decomp, oracle, algorithm)
    done = _trivial(rep, decomp)
    if done:
        return done
    budget = Budget(spec.options.selection_budget)
    try:
        ok = forall_exists_search(decomp, oracle, rep, budget)
    except NondeterministicAutomatonError as exc:
        rep.cause(NONDETERMINISTIC, detail=str(exc), states=exc.states)
        return rep.finish("INCONCLUSIVE", t0)
    finally:
        rep.record_calls(budget.log)
    if ok:
        return rep.finish("SATISFIED", t0)
    for i in decomp.open_lassos():
        if i not in rep.denied:
            if not decomp.eligible_pairs(i):
                rep.cause(NO_PAIR, lasso=i, detail=f"no eligible transition pair on lasso {decomp.lassos[i].label(decomp.automaton)}")
    if not rep.causes:
        rep.cause(_failure_cause(budget), detail="frontier exhausted with lassos left")
    return rep.finish("INCONCLUSIVE", t0)


def verify_rabin(spec: ProblemSpec, oracle: Oracle | None = None,
                 decomp: Decomposition | None = None) -> VerificationReport:
    """The forall-exists traversal over a deterministic Rabin automaton given as override."""
    decomp = decomp or decompose(spec)
    if not isinstance(decomp.automaton, RabinAutomaton) and not decomp.automaton.is_empty:
        raise ValueError("verify_rabin needs a Rabin automaton (HOA override with Rabin acceptance)")
    return verify_forall_exists(spec, oracle, decomp, algorithm="rabin")


def choose_algorithm(spec: ProblemSpec, decomp: Decomposition) -> str:
    algo = spec.options.algorithm
    if algo != "auto":
        return algo
    if isinstance(decomp.automaton, RabinAutomaton):
        return "rabin"
    if is_forall_exists(spec.prefix) and is_deterministic(decomp.automaton):
        return "forall_exists"
    return "general"


def run(spec: ProblemSpec, oracle: Oracle | None = None) -> VerificationReport:
    decomp = decompose(spec)
    algo = choose_algorithm(spec, decomp)
    if algo == "general":
        return verify_general(spec, oracle, decomp)
    if algo == "rabin":
        return verify_rabin(spec, oracle, decomp)
    return verify_forall_exists(spec, oracle, decomp)
