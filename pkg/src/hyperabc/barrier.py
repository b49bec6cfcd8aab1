"""Augmented barrier certificates: the defining conditions and sampling-based checks.

For a conditional invariance "once in A, never in B" over the p-fold
self-composition, a certificate ``B`` must satisfy

* ``B(x) <= 0`` on A (initial),
* ``B(x) >= eps`` on B (unsafe, strict positivity with margin ``eps``),
* ``B(f(x, w)) - B(x) <= 0`` on X^p for every universal input and the
  strategy-chosen existential inputs (decrease).

Each check reports the worst violation over grid and random samples; a
nonpositive worst violation (up to ``tol``) passes. Strategies are also
checked to stay inside the input set (input feasibility).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .automata.lassos import TransitionPair
from .formula.classify import classify_prefix
from .polysys import (AugmentedSystem, BasicSet, DynamicalSystem, Polynomial, SamplerConfig, Samples,
                      SemialgebraicRegion, copy_name, intersect_boxes, sample_basic_set, sample_region,
                      self_compose)

ROUNDED_TOL = 5e-2
SYNTH_TOL = 1e-8


@dataclass(frozen=True)
class ConditionalInvariance:
    """``G(s_A -> G !s_B)`` under a quantifier prefix, with both guards mapped to regions."""

    prefix: tuple[str, ...]  # "forall" / "exists" per copy
    set_a: SemialgebraicRegion
    set_b: SemialgebraicRegion
    provenance: TransitionPair | None = None
    label: str = ""


@dataclass(frozen=True)
class CertificateCandidate:
    barrier: Polynomial
    strategies: Mapping[str, Polynomial] = field(default_factory=dict)
    epsilon: float = 0.0

    def scaled(self, alpha: float) -> "CertificateCandidate":
        return CertificateCandidate(self.barrier * alpha, dict(self.strategies), self.epsilon * alpha)

    def to_json(self) -> dict:
        return {
            "barrier": str(self.barrier),
            "strategies": {k: str(v) for k, v in sorted(self.strategies.items())},
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_json(cls, data: Mapping, variables: Sequence[str] | None = None) -> "CertificateCandidate":
        from .polysys import parse_polynomial
        return cls(
            parse_polynomial(data["barrier"], variables),
            {k: parse_polynomial(v, variables) for k, v in data.get("strategies", {}).items()},
            float(data.get("epsilon", 0.0)),
        )


@dataclass
class CheckReport:
    condition: str  # initial | unsafe | decrease | input_feasibility
    verdict: str  # pass | fail | inconclusive
    samples: int
    worst_violation: float | None
    witness: dict[str, float] | None
    tol: float
    seed: int
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return asdict(self)

    def __str__(self):
        worst = "n/a" if self.worst_violation is None else f"{self.worst_violation:.3g}"
        return f"{self.condition}: {self.verdict} (worst violation {worst}, {self.samples} samples)"


@dataclass
class CIReport:
    initial: CheckReport
    unsafe: CheckReport
    decrease: CheckReport
    feasibility: CheckReport

    @property
    def triple(self) -> tuple[CheckReport, CheckReport, CheckReport]:
        return (self.initial, self.unsafe, self.decrease)

    @property
    def triple_passed(self) -> bool:
        return all(r.passed for r in self.triple)

    @property
    def passed(self) -> bool:
        return self.triple_passed and self.feasibility.passed

    def reports(self) -> list[CheckReport]:
        return [self.initial, self.unsafe, self.decrease, self.feasibility]

    def to_json(self) -> list[dict]:
        return [r.to_json() for r in self.reports()]


# -- strategies --------------------------------------------------------------

def existential_inputs(aug: AugmentedSystem, prefix: Sequence[str]) -> list[str]:
    return [w for i, q in enumerate(prefix, 1) if q == "exists" for w in aug.copy_input_vars(i)]


def universal_inputs(aug: AugmentedSystem, prefix: Sequence[str]) -> list[str]:
    return [w for i, q in enumerate(prefix, 1) if q == "forall" for w in aug.copy_input_vars(i)]


def strategy_arguments(aug: AugmentedSystem, prefix: Sequence[str], copy: int) -> list[str]:
    """Variables a strategy for copy ``copy`` may read: the whole augmented state and
    inputs of copies quantified earlier."""
    earlier = [w for i in range(1, copy) for w in aug.copy_input_vars(i)]
    return list(aug.state_vars) + earlier


def validate_strategies(c: CertificateCandidate, aug: AugmentedSystem, prefix: Sequence[str]) -> None:
    needed = existential_inputs(aug, prefix)
    missing = [w for w in needed if w not in c.strategies]
    if missing:
        raise ValueError(f"missing strategy for existential input(s) {missing}")
    extra = [w for w in c.strategies if w not in needed]
    if extra:
        raise ValueError(f"strategies given for non-existential input(s) {extra}")
    for w, h in c.strategies.items():
        copy = int(w.rsplit("__", 1)[1])
        allowed = set(strategy_arguments(aug, prefix, copy))
        bad = set(h.variables) - allowed
        if bad:
            raise ValueError(f"strategy for {w} reads {sorted(bad)}, outside its allowed arguments")
    extra_b = set(c.barrier.variables) - set(aug.state_vars)
    if extra_b:
        raise ValueError(f"certificate mentions non-state variables {sorted(extra_b)}")


def resolved_strategies(c: CertificateCandidate, prefix: Sequence[str], aug: AugmentedSystem) -> dict[str, Polynomial]:
    """Strategies with earlier existential inputs substituted, so each reads only states and universal inputs."""
    out: dict[str, Polynomial] = {}
    for w in existential_inputs(aug, prefix):
        out[w] = c.strategies[w].substitute(out) if out else c.strategies[w]
    return out


def decrease_polynomial(c: CertificateCandidate, aug: AugmentedSystem, prefix: Sequence[str]) -> Polynomial:
    """``B(f(x, w)) - B(x)`` with existential inputs replaced by their strategies."""
    h = resolved_strategies(c, prefix, aug)
    f_sub = {v: (fi.substitute(h) if h else fi) for v, fi in zip(aug.state_vars, aug.f)}
    return c.barrier.substitute(f_sub) - c.barrier


def feasibility_polynomials(c: CertificateCandidate, aug: AugmentedSystem, prefix: Sequence[str]) -> list[Polynomial]:
    """Input-set constraints ``g_in(h) >= 0`` for the existential copies."""
    h = resolved_strategies(c, prefix, aug)
    out = []
    for g in aug.input_set.gs:
        if set(g.variables) & set(h):
            out.append(g.substitute(h))
    return out


# -- sampling ----------------------------------------------------------------

def _report(condition: str, samples: Samples, violation: np.ndarray, tol: float, seed: int,
            note: str = "") -> CheckReport:
    if len(samples) == 0:
        return CheckReport(condition, "inconclusive", 0, None, None, tol, seed,
                           note or "no samples fell inside the region (it may be empty)")
    k = int(np.argmax(violation))
    worst = float(violation[k])
    verdict = "pass" if worst <= tol else "fail"
    return CheckReport(condition, verdict, len(samples), worst, samples.point(k), tol, seed, note)


def _state_samples(region: SemialgebraicRegion, aug: AugmentedSystem, config: SamplerConfig) -> Samples:
    names = tuple(aug.state_vars)
    within = region.restrict(aug.state_set.with_vars(names))
    return sample_region(within, aug.state_box(), config, names)


def check_initial(c: CertificateCandidate, ci: ConditionalInvariance, aug: AugmentedSystem,
                  config: SamplerConfig = SamplerConfig(), tol: float = SYNTH_TOL) -> CheckReport:
    pts = _state_samples(ci.set_a, aug, config)
    values = c.barrier.eval_batch(pts.columns) if len(pts) else np.zeros(0)
    return _report("initial", pts, values, tol, config.seed)


def check_unsafe(c: CertificateCandidate, ci: ConditionalInvariance, aug: AugmentedSystem,
                 config: SamplerConfig = SamplerConfig(), tol: float = SYNTH_TOL) -> CheckReport:
    pts = _state_samples(ci.set_b, aug, config)
    values = c.epsilon - c.barrier.eval_batch(pts.columns) if len(pts) else np.zeros(0)
    return _report("unsafe", pts, values, tol, config.seed)


def _domain_samples(aug: AugmentedSystem, prefix: Sequence[str], config: SamplerConfig) -> Samples:
    names = tuple(aug.state_vars) + tuple(universal_inputs(aug, prefix))
    domain = aug.state_set.conjoin(_restrict_inputs(aug.input_set, names)).with_vars(names)
    box = intersect_boxes(aug.state_box(), aug.input_box() if aug.input_vars else {})
    return sample_basic_set(domain, box, config, names)


def _restrict_inputs(input_set: BasicSet, names: Sequence[str]) -> BasicSet:
    keep = tuple(g for g in input_set.gs if set(g.variables) <= set(names))
    return BasicSet(keep, tuple(v for v in input_set.dim_vars if v in names))


def check_decrease(c: CertificateCandidate, ci: ConditionalInvariance | None, aug: AugmentedSystem,
                   config: SamplerConfig = SamplerConfig(), tol: float = SYNTH_TOL,
                   prefix: Sequence[str] | None = None) -> CheckReport:
    prefix = tuple(prefix or (ci.prefix if ci is not None else ("forall",) * aug.p))
    validate_strategies(c, aug, prefix)
    pts = _domain_samples(aug, prefix, config)
    values = decrease_polynomial(c, aug, prefix).eval_batch(pts.columns) if len(pts) else np.zeros(0)
    return _report("decrease", pts, values, tol, config.seed)


def check_input_feasibility(c: CertificateCandidate, aug: AugmentedSystem, prefix: Sequence[str],
                            config: SamplerConfig = SamplerConfig(), tol: float = SYNTH_TOL) -> CheckReport:
    validate_strategies(c, aug, prefix)
    polys = feasibility_polynomials(c, aug, prefix)
    pts = _domain_samples(aug, prefix, config)
    if not polys:
        note = "no existential inputs" if not c.strategies else "input set does not constrain the strategies"
        return CheckReport("input_feasibility", "pass", len(pts), 0.0, None, tol, config.seed, note)
    cols = pts.columns
    violation = np.max(np.vstack([-g.eval_batch(cols) for g in polys]), axis=0)
    return _report("input_feasibility", pts, violation, tol, config.seed)


def check_ci(c: CertificateCandidate, ci: ConditionalInvariance, aug: AugmentedSystem,
             config: SamplerConfig = SamplerConfig(), tol: float = SYNTH_TOL) -> CIReport:
    return CIReport(
        check_initial(c, ci, aug, config, tol),
        check_unsafe(c, ci, aug, config, tol),
        check_decrease(c, ci, aug, config, tol),
        check_input_feasibility(c, aug, ci.prefix, config, tol),
    )


def violation_at(condition: str, c: CertificateCandidate, aug: AugmentedSystem, prefix: Sequence[str],
                 point: Mapping[str, float]) -> float:
    """Re-evaluate one condition at a witness point."""
    if condition == "initial":
        return c.barrier.eval(point)
    if condition == "unsafe":
        return c.epsilon - c.barrier.eval(point)
    if condition == "decrease":
        return decrease_polynomial(c, aug, prefix).eval(point)
    if condition == "input_feasibility":
        return max(-g.eval(point) for g in feasibility_polynomials(c, aug, prefix))
    raise ValueError(f"unknown condition {condition!r}")


def check_classic_bc(barrier: Polynomial, sys: DynamicalSystem, initial: SemialgebraicRegion,
                     unsafe: SemialgebraicRegion, config: SamplerConfig = SamplerConfig(),
                     tol: float = SYNTH_TOL, epsilon: float = 0.0) -> CIReport:
    """Classic barrier certificate for one trace: the p = 1, all-universal case."""
    aug = self_compose(sys, 1)
    rename = {v: copy_name(v, 1) for v in sys.variables}
    back = {new: old for old, new in rename.items()}
    ci = ConditionalInvariance(("forall",), initial.rename(rename), unsafe.rename(rename))
    report = check_ci(CertificateCandidate(barrier.rename(rename), {}, epsilon), ci, aug, config, tol)
    for r in report.reports():
        if r.witness:
            r.witness = {back.get(k, k): v for k, v in r.witness.items()}
    return report


# -- simulation --------------------------------------------------------------

@dataclass
class Trajectory:
    states: np.ndarray  # (steps + 1, n) in aug.state_vars order
    barrier: np.ndarray
    left_domain_at: int | None


def simulate(aug: AugmentedSystem, c: CertificateCandidate, prefix: Sequence[str], x0: Mapping[str, float],
             steps: int, rng: np.random.Generator) -> Trajectory:
    """Run the augmented system with random universal inputs and strategy-chosen existential inputs.

    The run stops at the first state outside ``X^p`` (the dynamics are only
    defined on the state set).
    """
    prefix = tuple(prefix)
    h = resolved_strategies(c, prefix, aug)
    uni = universal_inputs(aug, prefix)
    box = aug.input_box() if aug.input_vars else {}
    point = {v: float(x0[v]) for v in aug.state_vars}
    states = [[point[v] for v in aug.state_vars]]
    left = None
    for t in range(steps):
        full = dict(point)
        for w in uni:
            lo, hi = box.get(w, (-math.inf, math.inf))
            full[w] = float(rng.uniform(lo, hi))
        for w, hw in h.items():
            full[w] = hw.eval(full)
        point = {v: fi.eval(full) for v, fi in zip(aug.state_vars, aug.f)}
        if not aug.state_set.contains(point, tol=1e-12):
            left = t + 1
            break
        states.append([point[v] for v in aug.state_vars])
    arr = np.array(states)
    cols = {v: arr[:, i] for i, v in enumerate(aug.state_vars)}
    return Trajectory(arr, c.barrier.eval_batch(cols), left)


def reports_to_json(reports: Sequence[CheckReport]) -> str:
    return json.dumps([r.to_json() for r in reports], indent=2, sort_keys=True)


def prefix_kinds(prefix) -> tuple[str, ...]:
    return tuple(q.kind if hasattr(q, "kind") else q for q in prefix)


def is_forall_exists(prefix) -> bool:
    return classify_prefix(list(prefix_kinds(prefix))).is_forall_exists
