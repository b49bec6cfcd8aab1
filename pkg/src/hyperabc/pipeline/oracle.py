"""The feasibility oracle: one common certificate for a set of transition pairs.

A set is feasible for us when a program is built and solved, its Gram
blocks validate, and the reconstructed certificate passes the sampled
checks on every pair. Any failing stage only means "not found".
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from ..barrier import CertificateCandidate, check_ci, existential_inputs
from ..sos import BasisError, DegreeDeficitError, synthesize
from ..sos.program import strategy_candidates
from .decompose import Decomposition

# INCONCLUSIVE causes
NO_PAIR = "no-pair"
SDP_INFEASIBLE = "sdp-infeasible"
SOLVER_MISSING = "solver-missing"
NONDETERMINISTIC = "nondeterministic-automaton"
BUDGET = "budget-exhausted"


@dataclass
class OracleOutcome:
    pairs: tuple[int, ...]
    feasible: bool
    cause: str = ""
    candidate: CertificateCandidate | None = None
    attempts: list[dict] = field(default_factory=list)
    checks: dict[int, list[dict]] = field(default_factory=dict)
    solution: list[float] | None = None
    strategy_mode: str = ""
    fixed_strategies: dict[str, str] | None = None
    seconds: float = 0.0

    def summary(self) -> dict:
        return {
            "pairs": list(self.pairs),
            "feasible": self.feasible,
            "cause": self.cause,
            "attempts": self.attempts,
        }


Oracle = Callable[[frozenset], OracleOutcome]


class SosOracle:
    """Memoized oracle over pair ids of one decomposition."""

    def __init__(self, decomp: Decomposition, solver: str | None = None):
        self.decomp = decomp
        self.options = decomp.spec.options
        self.solver = solver if solver is not None else self.options.sdp_solver
        self.cache: dict[frozenset, OracleOutcome] = {}
        self.calls = 0

    def strategy_plans(self) -> list[tuple[str, dict | None]]:
        aug, prefix = self.decomp.aug, self.decomp.prefix
        if not existential_inputs(aug, prefix):
            return [("none", None)]
        mode = self.options.strategy_mode
        plans: list[tuple[str, dict | None]] = []
        if mode in ("auto", "free"):
            plans.append(("free", None))
        if mode in ("auto", "fixed"):
            plans += [("fixed", c) for c in strategy_candidates(aug, prefix)]
        return plans

    def __call__(self, pairs: Iterable[int]) -> OracleOutcome:
        key = frozenset(pairs)
        if key in self.cache:
            return self.cache[key]
        self.calls += 1
        out = self._evaluate(tuple(sorted(key)))
        self.cache[key] = out
        return out

    def _evaluate(self, ids: tuple[int, ...]) -> OracleOutcome:
        t0 = time.perf_counter()
        d, opt = self.decomp, self.options
        cis = [d.pairs[k].ci for k in ids]
        outcome = OracleOutcome(ids, False, SDP_INFEASIBLE)
        for mode, fixed in self.strategy_plans():
            attempt = {"strategy_mode": mode,
                       "fixed_strategies": {w: str(h) for w, h in sorted(fixed.items())} if fixed else None}
            try:
                res = synthesize(cis, d.aug, d.prefix, opt.degrees, opt.epsilon, self.solver, opt.gram_tol,
                                 enforce_input_feasibility=opt.enforce_input_feasibility,
                                 fixed_strategies=fixed)
            except (DegreeDeficitError, BasisError) as exc:
                attempt.update(status="not-built", message=str(exc))
                outcome.attempts.append(attempt)
                continue
            attempt.update(status=res.status, message=res.message,
                           solver=res.solution.solver if res.solution else None,
                           solver_status=res.solution.raw_status if res.solution else None)
            if res.gram is not None:
                attempt["gram"] = {"ok": res.gram.ok, "min_eigenvalue": min(res.gram.min_eigenvalues, default=0.0),
                                   "max_residual": res.gram.max_residual}
            outcome.attempts.append(attempt)
            if res.status == "unavailable":
                outcome.cause = SOLVER_MISSING
                break
            if res.status != "found":
                continue
            checks = {k: check_ci(res.candidate, d.pairs[k].ci, d.aug, opt.sampler, opt.check_tol)
                      for k in ids}
            attempt["checks_passed"] = all(r.passed for r in checks.values())
            if attempt["checks_passed"]:
                outcome = OracleOutcome(ids, True, "", res.candidate, outcome.attempts,
                                        {k: r.to_json() for k, r in checks.items()},
                                        [float(v) for v in np.asarray(res.solution.x)], mode,
                                        attempt["fixed_strategies"])
                break
        outcome.seconds = time.perf_counter() - t0
        return outcome


class StubOracle:
    """Oracle that declares feasible exactly the subsets of the given pair sets (for tests and dry runs)."""

    def __init__(self, feasible_sets: Iterable[Iterable[int]]):
        self.feasible_sets = [frozenset(s) for s in feasible_sets]
        self.cache: dict[frozenset, OracleOutcome] = {}
        self.calls = 0
        self.log: list[frozenset] = []

    def __call__(self, pairs: Iterable[int]) -> OracleOutcome:
        key = frozenset(pairs)
        if key not in self.cache:
            self.calls += 1
            self.log.append(key)
            ok = any(key <= s for s in self.feasible_sets)
            self.cache[key] = OracleOutcome(tuple(sorted(key)), ok, "" if ok else SDP_INFEASIBLE)
        return self.cache[key]
