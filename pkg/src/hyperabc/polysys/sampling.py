"""Grid and random sampling of semialgebraic regions inside a bounding box."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .sets import BasicSet, Box, SemialgebraicRegion, intersect_boxes, require_bounded


@dataclass(frozen=True)
class SamplerConfig:
    grid_per_dim: int = 20
    grid_cap: int = 20_000
    n_random: int = 10_000
    seed: int = 0


class Samples:
    """A batch of points stored column-wise."""

    def __init__(self, names: Sequence[str], data: np.ndarray):
        self.names = tuple(names)
        self.data = np.asarray(data, dtype=float).reshape(-1, len(self.names))

    def __len__(self):
        return self.data.shape[0]

    @property
    def columns(self) -> dict[str, np.ndarray]:
        return {v: self.data[:, i] for i, v in enumerate(self.names)}

    def point(self, k: int) -> dict[str, float]:
        return {v: float(self.data[k, i]) for i, v in enumerate(self.names)}

    def filter(self, mask: np.ndarray) -> "Samples":
        return Samples(self.names, self.data[mask])

    def concat(self, other: "Samples") -> "Samples":
        if other.names != self.names:
            other = Samples(self.names, np.column_stack([other.columns[v] for v in self.names]))
        return Samples(self.names, np.vstack([self.data, other.data]))


def grid_points(box: Box, names: Sequence[str], per_dim: int, cap: int) -> Samples:
    """Tensor grid including both box faces; per-dimension count is reduced to respect ``cap``."""
    names = tuple(names)
    if not names:
        return Samples(names, np.zeros((1, 0)))
    k = per_dim
    while k > 1 and k ** len(names) > cap:
        k -= 1
    axes = []
    for v in names:
        lo, hi = box[v]
        axes.append(np.array([lo]) if lo == hi else np.linspace(lo, hi, max(k, 1)))
    mesh = np.meshgrid(*axes, indexing="ij")
    return Samples(names, np.column_stack([m.ravel() for m in mesh]))


def random_points(box: Box, names: Sequence[str], n: int, rng: np.random.Generator) -> Samples:
    names = tuple(names)
    lows = np.array([box[v][0] for v in names])
    highs = np.array([box[v][1] for v in names])
    return Samples(names, rng.uniform(lows, highs, size=(n, len(names))))


def box_center(box: Box, names: Sequence[str]) -> dict[str, float]:
    return {v: 0.5 * (box[v][0] + box[v][1]) for v in names}


def sample_basic_set(basic: BasicSet, outer: Box, config: SamplerConfig,
                     names: Sequence[str] | None = None, rng: np.random.Generator | None = None) -> Samples:
    """Grid plus uniform samples of ``outer`` (tightened by ``basic``'s own bounds), rejected into ``basic``."""
    names = tuple(names or basic.dim_vars)
    rng = rng or np.random.default_rng(config.seed)
    own = basic.box()
    if own is None:
        return Samples(names, np.zeros((0, len(names))))
    box = intersect_boxes(outer, own)
    if box is None:
        return Samples(names, np.zeros((0, len(names))))
    require_bounded(box, names)
    pts = grid_points(box, names, config.grid_per_dim, config.grid_cap)
    if config.n_random:
        pts = pts.concat(random_points(box, names, config.n_random, rng))
    return pts.filter(basic.contains_batch(pts.columns))


def sample_region(region: SemialgebraicRegion, outer: Box, config: SamplerConfig,
                  names: Sequence[str] | None = None) -> Samples:
    """Samples of every clause of ``region``; the random budget is split across clauses."""
    names = tuple(names or region.dim_vars)
    rng = np.random.default_rng(config.seed)
    clauses = region.nonempty_clauses()
    out = Samples(names, np.zeros((0, len(names))))
    if not clauses:
        return out
    per_clause = SamplerConfig(config.grid_per_dim, config.grid_cap,
                               max(1, config.n_random // len(clauses)), config.seed)
    for clause in clauses:
        out = out.concat(sample_basic_set(clause, outer, per_clause, names, rng))
    return out


def region_overlap_witness(r1: SemialgebraicRegion, r2: SemialgebraicRegion, box: Box,
                           budget: int = 10_000, seed: int = 0) -> dict[str, float] | None:
    """A point of ``r1 ∩ r2`` found by sampling, or ``None`` when the budget runs out.

    Box centers are tried first, so identical boxes are detected with one sample.
    """
    both = r1.intersect(r2)
    names = both.dim_vars
    rng = np.random.default_rng(seed)
    clauses = both.nonempty_clauses()
    for clause in clauses:
        clause_box = intersect_boxes(box, clause.box())
        if clause_box is None:
            continue
        require_bounded(clause_box, names)
        centre = box_center(clause_box, names)
        if clause.contains(centre):
            return centre
    remaining = budget - len(clauses)
    for clause in clauses:
        if remaining <= 0:
            break
        clause_box = intersect_boxes(box, clause.box())
        if clause_box is None:
            continue
        share = max(1, remaining // len(clauses))
        grid = grid_points(clause_box, names, 20, share // 2)
        pts = grid.concat(random_points(clause_box, names, max(0, share - len(grid)), rng))
        hits = np.nonzero(clause.contains_batch(pts.columns))[0]
        if len(hits):
            return pts.point(int(hits[0]))
    return None


def bounding_box(sets: Mapping[str, BasicSet] | Sequence[BasicSet]) -> Box:
    """Merge the single-variable bounds of several basic sets."""
    items = sets.values() if isinstance(sets, Mapping) else sets
    box: Box = {}
    for s in items:
        b = s.box()
        if b is None:
            raise ValueError(f"set {s} is empty")
        box = intersect_boxes(box, b) if box else b
    return box
