"""Discrete-time polynomial systems and their p-fold self-composition."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .polynomial import Polynomial
from .sets import BasicSet, Box, intersect_boxes


def copy_name(var: str, i: int) -> str:
    """Name of ``var`` in trace copy ``i`` (1-based)."""
    return f"{var}__{i}"


@dataclass(frozen=True)
class DynamicalSystem:
    state_vars: tuple[str, ...]
    input_vars: tuple[str, ...]
    f: tuple[Polynomial, ...]
    state_set: BasicSet
    input_set: BasicSet = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "state_vars", tuple(self.state_vars))
        object.__setattr__(self, "input_vars", tuple(self.input_vars))
        object.__setattr__(self, "f", tuple(self.f))
        if self.input_set is None:
            object.__setattr__(self, "input_set", BasicSet.full(self.input_vars))
        if len(self.f) != len(self.state_vars):
            raise ValueError(f"{len(self.f)} update polynomials for {len(self.state_vars)} state variables")
        allowed = set(self.state_vars) | set(self.input_vars)
        for name, fi in zip(self.state_vars, self.f):
            extra = set(fi.variables) - allowed
            if extra:
                raise ValueError(f"update of {name} uses unknown variable(s) {sorted(extra)}")
        if set(self.state_vars) & set(self.input_vars):
            raise ValueError("state and input variables must be disjoint")

    @property
    def variables(self) -> tuple[str, ...]:
        return self.state_vars + self.input_vars

    def step(self, point: Mapping[str, float]) -> dict[str, float]:
        return {v: fi.eval(point) for v, fi in zip(self.state_vars, self.f)}

    def step_batch(self, columns: Mapping[str, np.ndarray]) -> dict[str, np.ndarray]:
        return {v: fi.eval_batch(columns) for v, fi in zip(self.state_vars, self.f)}

    def state_box(self) -> Box:
        box = self.state_set.box()
        if box is None:
            raise ValueError("state set is empty")
        return box

    def input_box(self) -> Box:
        box = self.input_set.box()
        if box is None:
            raise ValueError("input set is empty")
        return box

    def box(self) -> Box:
        return intersect_boxes(self.state_box(), self.input_box()) or {}

    @property
    def is_closed(self) -> bool:
        return not self.input_vars


@dataclass(frozen=True)
class AugmentedSystem(DynamicalSystem):
    """The product of ``p`` copies of ``base``; copy ``i`` uses variables ``x__i``."""

    p: int = 1
    base: DynamicalSystem | None = None

    def copy_state_vars(self, i: int) -> tuple[str, ...]:
        return tuple(copy_name(v, i) for v in self.base.state_vars)

    def copy_input_vars(self, i: int) -> tuple[str, ...]:
        return tuple(copy_name(v, i) for v in self.base.input_vars)

    @property
    def f_p(self) -> tuple[Polynomial, ...]:
        return self.f


def self_compose(sys: DynamicalSystem, p: int) -> AugmentedSystem:
    if not isinstance(p, int) or p < 1:
        raise ValueError(f"p must be a positive integer, got {p!r}")
    state_vars: list[str] = []
    input_vars: list[str] = []
    f_p: list[Polynomial] = []
    state_set = BasicSet.full(())
    input_set = BasicSet.full(())
    for i in range(1, p + 1):
        mapping = {v: copy_name(v, i) for v in sys.variables}
        state_vars.extend(mapping[v] for v in sys.state_vars)
        input_vars.extend(mapping[v] for v in sys.input_vars)
        f_p.extend(fi.rename(mapping) for fi in sys.f)
        state_set = state_set.conjoin(sys.state_set.rename(mapping))
        input_set = input_set.conjoin(sys.input_set.rename(mapping))
    return AugmentedSystem(
        state_vars=tuple(state_vars),
        input_vars=tuple(input_vars),
        f=tuple(f_p),
        state_set=state_set.with_vars(state_vars),
        input_set=input_set.with_vars(input_vars),
        p=p,
        base=sys,
    )


def rename_copy(poly: Polynomial, variables: Sequence[str], i: int) -> Polynomial:
    return poly.rename({v: copy_name(v, i) for v in variables})
