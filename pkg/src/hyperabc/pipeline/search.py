"""Budgeted searches over sets of transition pairs."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .oracle import Oracle, OracleOutcome

DEFAULT_BUDGET = 64
_PRODUCT_CAP = 100_000


@dataclass
class Budget:
    limit: int = DEFAULT_BUDGET
    used: int = 0
    log: list[OracleOutcome] = field(default_factory=list)

    @property
    def exhausted(self) -> bool:
        return self.used >= self.limit

    def ask(self, oracle: Oracle, pairs) -> OracleOutcome | None:
        if self.exhausted:
            return None
        self.used += 1
        out = oracle(frozenset(pairs))
        self.log.append(out)
        return out


def candidate_selections(options: Sequence[Sequence[int]]) -> list[frozenset]:
    """Distinct pair sets obtained by picking one pair per lasso, smallest first."""
    if any(not o for o in options):
        return []
    found = set()
    for combo in itertools.islice(itertools.product(*[sorted(set(o)) for o in options]), _PRODUCT_CAP):
        found.add(frozenset(combo))
    minimal = [s for s in found if not any(t < s for t in found)]
    return sorted(minimal, key=lambda s: (len(s), sorted(s)))


def selection_search(options: Sequence[Sequence[int]], oracle: Oracle,
                     budget: Budget | int = DEFAULT_BUDGET) -> frozenset | None:
    """First selection (one pair per lasso) admitting a common certificate.

    Selections are tried by increasing number of distinct pairs. A set that
    contains a known infeasible set is skipped without asking the oracle,
    since a common certificate for it would also serve the subset.
    """
    if isinstance(budget, int):
        budget = Budget(budget)
    failed: list[frozenset] = []
    for sel in candidate_selections(options):
        if any(f <= sel for f in failed):
            continue
        out = budget.ask(oracle, sel)
        if out is None:
            return None
        if out.feasible:
            return sel
        failed.append(sel)
    return None


def greedy_subset(pairs: Sequence[int], oracle: Oracle, budget: Budget) -> frozenset | None:
    """Largest subset (all of ``pairs`` first, then one fewer at a time) with a common certificate."""
    pairs = list(dict.fromkeys(pairs))
    for size in range(len(pairs), 0, -1):
        for combo in itertools.combinations(pairs, size):
            sel = frozenset(combo)
            out = budget.ask(oracle, sel)
            if out is None:
                return None
            if out.feasible:
                return sel
    return None
