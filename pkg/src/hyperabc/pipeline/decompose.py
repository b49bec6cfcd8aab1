"""From a problem spec to lassos, transition pairs and conditional invariances.

The automaton for the negated body is built (or loaded from an HOA
override), edges whose guard denotes no state of ``X^p`` are removed, and
guards into a universal accepting sink are subtracted from sibling edges.
Each distinct consecutive transition pair becomes one conditional
invariance; pairs whose two regions overlap inside the state set cannot be
separated by any certificate and are marked ineligible up front.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

from ..automata import (FALSE, BuchiAutomaton, Edge, Guard, Lasso, RabinAutomaton, TransitionPair,
                        enumerate_lassos, enumerate_lassos_rabin, hoa_import, implies, ltl_to_nba,
                        pair_set, parse_guard, prune, renumber, restrict_to_sinks, transition_pairs)
from ..barrier import ConditionalInvariance
from ..formula import negate_to_nnf
from ..polysys import SemialgebraicRegion, region_overlap_witness
from ..polysys.system import AugmentedSystem
from .problem import ProblemSpec, ProblemSpecError, cube_region, guard_region


@dataclass
class PairInfo:
    id: int
    s_a: Guard
    s_b: Guard
    ci: ConditionalInvariance
    lassos: list[int] = field(default_factory=list)
    eligible: bool = True
    witness: dict[str, float] | None = None

    @property
    def key(self) -> tuple[Guard, Guard]:
        return (self.s_a, self.s_b)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "s_A": str(self.s_a),
            "s_B": str(self.s_b),
            "lassos": list(self.lassos),
            "eligible": self.eligible,
            "precheck_witness": self.witness,
        }


@dataclass
class Decomposition:
    spec: ProblemSpec
    aug: AugmentedSystem
    automaton: BuchiAutomaton
    lassos: list[Lasso]
    pairs: list[PairInfo]
    lasso_pairs: list[list[int]]  # pair ids per lasso (pair-set order)
    discharged: dict[int, str]  # lasso id -> assumed guard text

    @property
    def prefix(self) -> tuple[str, ...]:
        return self.spec.prefix

    @property
    def vacuous(self) -> bool:
        return not self.lassos

    def pair(self, s_a: Guard, s_b: Guard) -> PairInfo | None:
        for p in self.pairs:
            if p.key == (s_a, s_b):
                return p
        return None

    def open_lassos(self) -> list[int]:
        return [i for i in range(len(self.lassos)) if i not in self.discharged]

    def eligible_pairs(self, lasso_id: int) -> list[int]:
        return [k for k in self.lasso_pairs[lasso_id] if self.pairs[k].eligible]

    def lasso_json(self, i: int) -> dict:
        lasso = self.lassos[i]
        return {
            "id": i,
            "states": list(lasso.states),
            "label": lasso.label(self.automaton),
            "edges": [[e.src, e.dst, str(e.guard)] for e in lasso.edges],
            "rabin_pair": lasso.pair_index,
            "pairs": list(self.lasso_pairs[i]),
            "discharged_by_assumption": self.discharged.get(i),
        }

    def to_json(self) -> dict:
        return {
            "lassos": [self.lasso_json(i) for i in range(len(self.lassos))],
            "pairs": [p.to_json() for p in self.pairs],
        }


def _names(spec: ProblemSpec) -> tuple[str, ...]:
    return tuple(spec.augmented().state_vars)


def cube_is_empty(cube, spec: ProblemSpec, aug: AugmentedSystem) -> bool:
    """True when the cube's region has no clause with consistent bounds inside ``X^p``.

    Only bound conflicts are used, so ``True`` is a proof of emptiness.
    """
    region = cube_region(cube, spec).restrict(aug.state_set.with_vars(aug.state_vars))
    return region.is_trivially_empty() or all(c.box() is None for c in region.clauses)


def semantic_prune(aut: BuchiAutomaton, spec: ProblemSpec, aug: AugmentedSystem) -> BuchiAutomaton:
    edges = []
    for e in aut.edges:
        cubes = [c for c in e.guard.cubes if not cube_is_empty(c, spec, aug)]
        g = Guard.of_cubes(cubes, aut.alphabet)
        if not g.is_false:
            edges.append(Edge(e.src, e.dst, g))
    return prune(aut.with_edges(edges))


def load_override(spec: ProblemSpec) -> BuchiAutomaton:
    path = spec.override_path()
    aut = hoa_import(path.read_text(), atom_arity=spec.atom_arity)
    bound = set(spec.formula.trace_vars)
    for a in aut.all_atoms():
        if not set(a.traces) <= bound:
            raise ProblemSpecError(f"automaton proposition {a} uses trace variables outside the formula")
    return aut


def negated_automaton(spec: ProblemSpec, aug: AugmentedSystem | None = None) -> BuchiAutomaton:
    """The automaton for the negated body after semantic pruning and sink restriction."""
    aug = aug or spec.augmented()
    if spec.options.automaton_override:
        aut = load_override(spec)
    else:
        aut = ltl_to_nba(negate_to_nnf(spec.formula.body), restrict=False)
    if aut.is_empty:
        return aut
    aut = semantic_prune(aut, spec, aug)
    if aut.is_empty:
        return aut
    if not isinstance(aut, RabinAutomaton):
        aut = restrict_to_sinks(aut)
    return renumber(aut)


def _within_x(region: SemialgebraicRegion, aug: AugmentedSystem) -> SemialgebraicRegion:
    return region.restrict(aug.state_set.with_vars(aug.state_vars))


def precheck(info: PairInfo, aug: AugmentedSystem, budget: int, seed: int) -> None:
    """Mark the pair ineligible when ``A`` and ``B`` share a point of ``X^p``.

    A certificate would need ``B <= 0`` and ``B >= eps > 0`` at that point.
    """
    a = _within_x(info.ci.set_a, aug)
    b = _within_x(info.ci.set_b, aug)
    w = region_overlap_witness(a, b, aug.state_box(), budget=budget, seed=seed)
    if w is not None:
        info.eligible = False
        info.witness = {k: float(v) for k, v in sorted(w.items())}


def lasso_list(aut: BuchiAutomaton) -> list[Lasso]:
    if isinstance(aut, RabinAutomaton):
        return enumerate_lassos_rabin(aut)
    return enumerate_lassos(aut)


def assumed_guards(spec: ProblemSpec, aut: BuchiAutomaton) -> list[tuple[str, Guard]]:
    out = []
    bound = set(spec.formula.trace_vars)
    for text in spec.options.assumed_unreachable_initial_guards:
        g = parse_guard(text, aut.alphabet, spec.atom_arity)
        if not all(set(a.traces) <= bound for a in g.atoms()):
            raise ProblemSpecError(f"assumed guard {text!r} uses unbound trace variables")
        out.append((text, g))
    return out


def discharged_lassos(lassos: list[Lasso], assumed: list[tuple[str, Guard]], alphabet) -> dict[int, str]:
    """Lassos whose first letter lies inside the assumed-unreachable initial guards."""
    if not assumed:
        return {}
    union = reduce(lambda g, h: g.disj(h, alphabet), (g for _, g in assumed), FALSE)
    text = " | ".join(f"({t})" for t, _ in assumed)
    out = {}
    for i, lasso in enumerate(lassos):
        first = lasso.edges[0].guard
        if implies(first, union, alphabet):
            hits = [t for t, g in assumed if implies(first, g, alphabet)]
            out[i] = hits[0] if len(hits) == 1 else text
    return out


def make_ci(spec: ProblemSpec, s_a: Guard, s_b: Guard, tp: TransitionPair | None = None) -> ConditionalInvariance:
    return ConditionalInvariance(spec.prefix, guard_region(s_a, spec), guard_region(s_b, spec), tp,
                                 f"({s_a}) -> G !({s_b})")


def decompose(spec: ProblemSpec, aut: BuchiAutomaton | None = None, run_precheck: bool = True) -> Decomposition:
    aug = spec.augmented()
    if aut is None:
        aut = negated_automaton(spec, aug)
    lassos = lasso_list(aut)
    pairs: list[PairInfo] = []
    index: dict[tuple[Guard, Guard], int] = {}
    lasso_pairs: list[list[int]] = []
    for i, lasso in enumerate(lassos):
        ids = []
        for tp in pair_set(lasso, i):
            k = index.get(tp.key)
            if k is None:
                k = index[tp.key] = len(pairs)
                pairs.append(PairInfo(k, tp.s_a, tp.s_b, make_ci(spec, tp.s_a, tp.s_b, tp)))
            if i not in pairs[k].lassos:
                pairs[k].lassos.append(i)
            ids.append(k)
        lasso_pairs.append(ids)
    if run_precheck:
        for info in pairs:
            precheck(info, aug, spec.options.precheck_budget, spec.options.seed)
    discharged = discharged_lassos(lassos, assumed_guards(spec, aut), aut.alphabet)
    return Decomposition(spec, aug, aut, lassos, pairs, lasso_pairs, discharged)


def edge_steps(lasso: Lasso) -> list[tuple[Edge, Edge]]:
    """Consecutive edge pairs of a lasso, including the wrap-around of its cycle."""
    return [tp.edges for tp in transition_pairs(lasso)]
