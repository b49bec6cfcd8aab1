"""Basic semialgebraic sets, finite unions of them, and bounding boxes."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .polynomial import Polynomial

Box = dict[str, tuple[float, float]]

DEFAULT_NEGATION_GAP = 1e-2


def negate_inequality(g: Polynomial, gap: float = DEFAULT_NEGATION_GAP) -> Polynomial:
    """Inner approximation of ``{g < 0}`` as ``{-g - gap >= 0}``."""
    if not gap > 0:
        raise ValueError(f"negation gap must be positive, got {gap}")
    return -g - gap


@dataclass(frozen=True)
class BasicSet:
    """Conjunction ``g_i(x) >= 0`` over ``dim_vars``."""

    gs: tuple[Polynomial, ...] = ()
    dim_vars: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gs", tuple(self.gs))
        object.__setattr__(self, "dim_vars", tuple(self.dim_vars))
        allowed = set(self.dim_vars)
        for g in self.gs:
            extra = set(g.variables) - allowed
            if extra:
                raise ValueError(f"constraint {g} uses {sorted(extra)} outside {self.dim_vars}")

    @classmethod
    def full(cls, dim_vars: Sequence[str]) -> "BasicSet":
        return cls((), tuple(dim_vars))

    @classmethod
    def empty(cls, dim_vars: Sequence[str]) -> "BasicSet":
        return cls((Polynomial.constant(-1.0),), tuple(dim_vars))

    def with_vars(self, dim_vars: Sequence[str]) -> "BasicSet":
        return BasicSet(self.gs, tuple(dim_vars))

    def conjoin(self, other: "BasicSet") -> "BasicSet":
        names = _merge_vars(self.dim_vars, other.dim_vars)
        return BasicSet(_dedupe(self.gs + other.gs), names)

    def rename(self, mapping: Mapping[str, str]) -> "BasicSet":
        return BasicSet(tuple(g.rename(mapping) for g in self.gs), tuple(mapping.get(v, v) for v in self.dim_vars))

    def contains(self, point: Mapping[str, float], tol: float = 0.0) -> bool:
        return all(g.eval(point) >= -tol for g in self.gs)

    def contains_batch(self, columns: Mapping[str, np.ndarray], tol: float = 0.0) -> np.ndarray:
        n = len(next(iter(columns.values()))) if columns else 1
        mask = np.ones(n, dtype=bool)
        for g in self.gs:
            mask &= g.eval_batch(columns) >= -tol
        return mask

    def is_trivially_empty(self) -> bool:
        return any(g.is_constant() and g.constant_term() < 0 for g in self.gs)

    def box(self) -> Box | None:
        """Axis-aligned bounds implied by single-variable constraints; ``None`` if provably empty."""
        box: Box = {v: (-math.inf, math.inf) for v in self.dim_vars}
        for g in self.gs:
            if g.is_constant():
                if g.constant_term() < 0:
                    return None
                continue
            if len(g.variables) != 1:
                continue
            (v,) = g.variables
            interval = _univariate_interval(g)
            if interval is None:
                continue
            lo, hi = interval
            olo, ohi = box[v]
            box[v] = (max(lo, olo), min(hi, ohi))
            if box[v][0] > box[v][1]:
                return None
        return box

    def __str__(self):
        if not self.gs:
            return "true"
        return " & ".join(f"({g}) >= 0" for g in self.gs)


@dataclass(frozen=True)
class SemialgebraicRegion:
    """Finite union of basic sets sharing ``dim_vars``."""

    clauses: tuple[BasicSet, ...]
    dim_vars: tuple[str, ...] = field(default=())

    def __post_init__(self):
        clauses = tuple(self.clauses)
        if not clauses:
            raise ValueError("a region needs at least one clause; use SemialgebraicRegion.empty")
        names = tuple(self.dim_vars) or clauses[0].dim_vars
        for c in clauses:
            if set(c.dim_vars) - set(names):
                names = _merge_vars(names, c.dim_vars)
        object.__setattr__(self, "clauses", tuple(c.with_vars(names) for c in clauses))
        object.__setattr__(self, "dim_vars", tuple(names))

    @classmethod
    def of(cls, basic: BasicSet) -> "SemialgebraicRegion":
        return cls((basic,), basic.dim_vars)

    @classmethod
    def full(cls, dim_vars: Sequence[str]) -> "SemialgebraicRegion":
        return cls((BasicSet.full(dim_vars),), tuple(dim_vars))

    @classmethod
    def empty(cls, dim_vars: Sequence[str]) -> "SemialgebraicRegion":
        return cls((BasicSet.empty(dim_vars),), tuple(dim_vars))

    def is_trivially_empty(self) -> bool:
        return all(c.is_trivially_empty() for c in self.clauses)

    def union(self, other: "SemialgebraicRegion") -> "SemialgebraicRegion":
        names = _merge_vars(self.dim_vars, other.dim_vars)
        clauses = [c for c in self.clauses + other.clauses if not c.is_trivially_empty()]
        if not clauses:
            return SemialgebraicRegion.empty(names)
        return SemialgebraicRegion(tuple(_dedupe(clauses)), names)

    def intersect(self, other: "SemialgebraicRegion") -> "SemialgebraicRegion":
        names = _merge_vars(self.dim_vars, other.dim_vars)
        clauses = []
        for a, b in itertools.product(self.clauses, other.clauses):
            c = a.conjoin(b).with_vars(names)
            if c.box() is not None:
                clauses.append(c)
        if not clauses:
            return SemialgebraicRegion.empty(names)
        return SemialgebraicRegion(tuple(_dedupe(clauses)), names)

    def restrict(self, basic: BasicSet) -> "SemialgebraicRegion":
        return self.intersect(SemialgebraicRegion.of(basic))

    def complement(self, gap: float = DEFAULT_NEGATION_GAP) -> "SemialgebraicRegion":
        """Inner approximation of the complement (De Morgan with gapped negation)."""
        result = SemialgebraicRegion.full(self.dim_vars)
        for clause in self.clauses:
            if not clause.gs:
                return SemialgebraicRegion.empty(self.dim_vars)
            negated = [BasicSet((negate_inequality(g, gap),), self.dim_vars) for g in clause.gs]
            result = result.intersect(SemialgebraicRegion(tuple(negated), self.dim_vars))
        return result

    def rename(self, mapping: Mapping[str, str]) -> "SemialgebraicRegion":
        return SemialgebraicRegion(tuple(c.rename(mapping) for c in self.clauses),
                                   tuple(mapping.get(v, v) for v in self.dim_vars))

    def contains(self, point: Mapping[str, float], tol: float = 0.0) -> bool:
        return any(c.contains(point, tol) for c in self.clauses)

    def contains_batch(self, columns: Mapping[str, np.ndarray], tol: float = 0.0) -> np.ndarray:
        mask = None
        for c in self.clauses:
            m = c.contains_batch(columns, tol)
            mask = m if mask is None else (mask | m)
        return mask

    def nonempty_clauses(self) -> list[BasicSet]:
        return [c for c in self.clauses if c.box() is not None]

    def __str__(self):
        if self.is_trivially_empty():
            return "false"
        return " | ".join(f"[{c}]" for c in self.clauses)


def intersect_boxes(a: Box, b: Box) -> Box | None:
    out: Box = {}
    for v in set(a) | set(b):
        lo1, hi1 = a.get(v, (-math.inf, math.inf))
        lo2, hi2 = b.get(v, (-math.inf, math.inf))
        lo, hi = max(lo1, lo2), min(hi1, hi2)
        if lo > hi:
            return None
        out[v] = (lo, hi)
    return out


def require_bounded(box: Box, names: Iterable[str]) -> None:
    loose = [v for v in names if not (math.isfinite(box.get(v, (-math.inf,))[0]) and math.isfinite(box.get(v, (0, math.inf))[1]))]
    if loose:
        raise ValueError(
            f"no finite bounds for {', '.join(sorted(loose))}; add range constraints to the state/input sets "
            "or declare explicit bounds"
        )


def _univariate_interval(g: Polynomial) -> tuple[float, float] | None:
    """Interval ``{x | g(x) >= 0}`` for linear or concave quadratic ``g``; ``None`` if not of that shape."""
    deg = g.degree()
    if deg == 1:
        a = g.coefficient({g.variables[0]: 1})
        b = g.constant_term()
        root = -b / a
        return (root, math.inf) if a > 0 else (-math.inf, root)
    if deg == 2:
        x = g.variables[0]
        a = g.coefficient({x: 2})
        b = g.coefficient({x: 1})
        c = g.constant_term()
        if a >= 0:
            return None
        disc = b * b - 4 * a * c
        if disc < 0:
            return (math.inf, -math.inf)
        r = math.sqrt(disc)
        x1, x2 = (-b + r) / (2 * a), (-b - r) / (2 * a)
        return (min(x1, x2), max(x1, x2))
    return None


def _merge_vars(a: Sequence[str], b: Sequence[str]) -> tuple[str, ...]:
    out = list(a)
    out.extend(v for v in b if v not in out)
    return tuple(out)


def _dedupe(items):
    seen = []
    for x in items:
        if x not in seen:
            seen.append(x)
    return tuple(seen)
