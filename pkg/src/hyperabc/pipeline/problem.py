"""Problem specifications: a JSON document naming a system, atoms, a formula and options."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import jsonschema

from ..automata.guards import Guard
from ..formula import Atom, FormulaScopeError, HyperLTLFormula, parse_hyperltl
from ..polysys import (BasicSet, DynamicalSystem, Polynomial, SamplerConfig, SemialgebraicRegion,
                       copy_name, parse_polynomial, self_compose)
from ..polysys.system import AugmentedSystem
from ..sos import SosDegrees


class ProblemSpecError(ValueError):
    pass


@dataclass(frozen=True)
class AtomDecl:
    """``gs >= 0`` over base state variables (single) or over ``v__j`` for argument ``j`` (joint)."""

    name: str
    scope: str
    arity: int
    gs: tuple[Polynomial, ...]
    description: str = ""


@dataclass(frozen=True)
class Options:
    degrees: SosDegrees = SosDegrees()
    epsilon: float = 0.01
    negation_gap: float = 0.01
    check_tol: float = 1e-6
    gram_tol: float = 1e-6
    samples: SamplerConfig = SamplerConfig()
    precheck_budget: int = 10_000
    selection_budget: int = 64
    seed: int = 0
    sdp_solver: str | None = None
    algorithm: str = "auto"
    strategy_mode: str = "auto"
    enforce_input_feasibility: bool = True
    assumed_unreachable_initial_guards: tuple[str, ...] = ()
    automaton_override: str | None = None

    @property
    def sampler(self) -> SamplerConfig:
        return replace(self.samples, seed=self.seed)

    def to_json(self) -> dict:
        out = asdict(self)
        out["degrees"] = {"barrier": self.degrees.barrier, "strategy": self.degrees.strategy,
                          "multiplier": self.degrees.multiplier}
        out["samples"] = {"grid_per_dim": self.samples.grid_per_dim, "grid_cap": self.samples.grid_cap,
                          "n_random": self.samples.n_random}
        out["assumed_unreachable_initial_guards"] = list(self.assumed_unreachable_initial_guards)
        return out


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    system: DynamicalSystem
    atoms: Mapping[str, AtomDecl]
    formula: HyperLTLFormula
    options: Options = Options()
    base_dir: Path | None = None
    raw: Mapping[str, Any] = field(default_factory=dict, compare=False)

    @property
    def prefix(self) -> tuple[str, ...]:
        return tuple(q.kind for q in self.formula.prefix)

    @property
    def p(self) -> int:
        return len(self.formula.prefix)

    @property
    def atom_arity(self) -> dict[str, int]:
        return {n: a.arity for n, a in self.atoms.items()}

    def augmented(self) -> AugmentedSystem:
        return self_compose(self.system, self.p)

    def override_path(self) -> Path | None:
        path = self.options.automaton_override
        if not path:
            return None
        path = Path(path)
        if not path.is_absolute() and self.base_dir is not None:
            path = self.base_dir / path
        return path


def schema() -> dict:
    text = resources.files("hyperabc").joinpath("data/problem_spec.schema.json").read_text()
    return json.loads(text)


def _options(data: Mapping[str, Any]) -> Options:
    kw: dict[str, Any] = {k: v for k, v in data.items() if k not in ("degrees", "samples")}
    if "degrees" in data:
        kw["degrees"] = SosDegrees(**data["degrees"])
    if "samples" in data:
        kw["samples"] = SamplerConfig(**data["samples"])
    if "assumed_unreachable_initial_guards" in kw:
        kw["assumed_unreachable_initial_guards"] = tuple(kw["assumed_unreachable_initial_guards"])
    return Options(**kw)


def _system(data: Mapping[str, Any]) -> DynamicalSystem:
    xs = tuple(data["state_vars"])
    ws = tuple(data.get("input_vars", ()))
    names = xs + ws
    dyn = data["dynamics"]
    if set(dyn) != set(xs):
        raise ProblemSpecError(f"dynamics must give exactly one update per state variable {list(xs)}")
    f = tuple(parse_polynomial(dyn[v], names) for v in xs)
    state_gs = [parse_polynomial(g, xs) for g in data["state_set"]]
    input_gs = [parse_polynomial(g, ws) for g in data.get("input_set", ())]
    for v, (lo, hi) in sorted(data.get("bounds", {}).items()):
        if v not in names:
            raise ProblemSpecError(f"bounds given for unknown variable {v!r}")
        if lo > hi:
            raise ProblemSpecError(f"empty bounds [{lo}, {hi}] for {v!r}")
        x = Polynomial.var(v)
        (state_gs if v in xs else input_gs).extend([x - lo, hi - x])
    state_set = BasicSet(tuple(state_gs), xs)
    input_set = BasicSet(tuple(input_gs), ws)
    return DynamicalSystem(xs, ws, f, state_set, input_set)


def _atom(name: str, data: Mapping[str, Any], state_vars: tuple[str, ...]) -> AtomDecl:
    scope = data.get("scope", "single")
    arity = int(data.get("arity", 1 if scope == "single" else 2))
    if scope == "single" and arity != 1:
        raise ProblemSpecError(f"single-trace atom {name!r} must have arity 1")
    allowed = state_vars if scope == "single" else tuple(copy_name(v, j) for j in range(1, arity + 1)
                                                        for v in state_vars)
    gs = tuple(parse_polynomial(g, allowed) for g in data["gs"])
    return AtomDecl(name, scope, arity, gs, data.get("description", ""))


def load_problem(source: str | os.PathLike | Mapping[str, Any]) -> ProblemSpec:
    """Validate against the shipped schema and build the typed specification."""
    base_dir = None
    if isinstance(source, Mapping):
        data = dict(source)
    else:
        path = Path(source)
        data = json.loads(path.read_text())
        base_dir = path.resolve().parent
    try:
        jsonschema.validate(data, schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ProblemSpecError(f"problem spec invalid at {where}: {exc.message}") from None
    try:
        system = _system(data["system"])
        atoms = {n: _atom(n, a, system.state_vars) for n, a in sorted(data["atoms"].items())}
        formula = parse_hyperltl(data["formula"], {n: a.arity for n, a in atoms.items()})
    except (ValueError, FormulaScopeError) as exc:
        if isinstance(exc, ProblemSpecError):
            raise
        raise ProblemSpecError(str(exc)) from exc
    options = _options(data.get("options", {}))
    name = data.get("name") or (Path(source).stem if base_dir else "problem")
    return ProblemSpec(name, system, atoms, formula, options, base_dir, data)


def bundled_problem(name: str) -> ProblemSpec:
    """One of the problems shipped in ``hyperabc/data`` (e.g. ``vehicle_opacity``)."""
    ref = resources.files("hyperabc").joinpath(f"data/{name}.json")
    with resources.as_file(ref) as path:
        return load_problem(path)


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("hyperabc").joinpath(f"data/{name}")))


# -- atoms and guards as regions of the augmented state space ---------------

def atom_region(atom: Atom, spec: ProblemSpec) -> SemialgebraicRegion:
    decl = spec.atoms.get(atom.name)
    if decl is None:
        raise ProblemSpecError(f"undeclared atom {atom.name!r}")
    if decl.arity != len(atom.traces):
        raise ProblemSpecError(f"atom {atom} does not match arity {decl.arity}")
    xs = spec.system.state_vars
    copies = [spec.formula.index_of(t) for t in atom.traces]
    if decl.scope == "single":
        mapping = {v: copy_name(v, copies[0]) for v in xs}
    else:
        mapping = {copy_name(v, j): copy_name(v, k) for j, k in enumerate(copies, 1) for v in xs}
    names = tuple(copy_name(v, i) for i in range(1, spec.p + 1) for v in xs)
    return SemialgebraicRegion.of(BasicSet(tuple(g.rename(mapping) for g in decl.gs), names))


def guard_region(guard: Guard, spec: ProblemSpec) -> SemialgebraicRegion:
    """Union over cubes of the intersection of literal regions; negation uses the gap."""
    names = tuple(copy_name(v, i) for i in range(1, spec.p + 1) for v in spec.system.state_vars)
    out = SemialgebraicRegion.empty(names)
    for cube in sorted(guard.cubes, key=lambda c: sorted((str(a), v) for a, v in c)):
        out = out.union(cube_region(cube, spec))
    return out


def cube_region(cube, spec: ProblemSpec) -> SemialgebraicRegion:
    names = tuple(copy_name(v, i) for i in range(1, spec.p + 1) for v in spec.system.state_vars)
    region = SemialgebraicRegion.full(names)
    for atom, positive in sorted(cube, key=lambda lit: (str(lit[0]), lit[1])):
        r = atom_region(atom, spec)
        region = region.intersect(r if positive else r.complement(spec.options.negation_gap))
    return region
