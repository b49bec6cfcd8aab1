"""Sum-of-squares programs for augmented barrier certificates.

Every SOS constraint ``e(z) is SOS`` becomes ``e = m(z)^T Q m(z)`` with a
fresh PSD Gram block ``Q``, matched coefficient by coefficient. Decision
variables are the coefficients of ``B``, the strategy coefficients and the
Gram entries; all constraints stay affine in them.

For conditional invariances ``(A_k, B_k)`` over the augmented system the
program asks for

* ``-B - sum lambda0_i g0_i`` SOS on every clause of every ``A_k``,
* ``B - sum lambdau_i gu_i - eps`` SOS on every clause of every ``B_k``,
* ``-B(f(x, w)) + B(x) - sum lambda_i g_i - sum lambdain_i gin_i - sum (w_e - h_e)``
  SOS once, with ``h_e`` the strategy of each existential input ``w_e``.

Multipliers are SOS polynomials, one per constraint polynomial. Clause
constraints are conjoined with the state set so the conditions only need
to hold inside ``X^p``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import sparse

from ..barrier import ConditionalInvariance, existential_inputs, strategy_arguments
from ..polysys import AugmentedSystem, BasicSet, Polynomial, monomials_up_to
from ..polysys.polynomial import Exponent
from .affine import CONST, AffinePolynomial
from .basis import MonomialBasis
from .sdp import SdpProblem


class DegreeDeficitError(ValueError):
    """The requested degree bounds cannot represent an expression of the program."""


class BasisError(ValueError):
    """An expression has a monomial outside the products of the Gram basis."""


@dataclass(frozen=True)
class SosDegrees:
    barrier: int = 2
    strategy: int = 2
    multiplier: int = 2
    master: int | None = None  # cap on the degree of each SOS expression; None means automatic

    def __post_init__(self):
        if self.barrier < 0 or self.strategy < 0 or self.multiplier < 0:
            raise ValueError("degrees must be nonnegative")
        if self.multiplier % 2:
            raise ValueError("SOS multiplier degree must be even")


@dataclass
class GramBlock:
    label: str
    basis: MonomialBasis
    first_var: int  # index of Q[0, 0]; entries (i <= j) follow row by row

    def index(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        n = len(self.basis)
        return self.first_var + i * n - i * (i - 1) // 2 + (j - i)

    @property
    def n_entries(self) -> int:
        n = len(self.basis)
        return n * (n + 1) // 2

    def matrix(self, values: Sequence[float]) -> np.ndarray:
        n = len(self.basis)
        Q = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                Q[i, j] = Q[j, i] = values[self.index(i, j)]
        return Q


@dataclass
class Equality:
    coeffs: dict[int, float]
    rhs: float
    label: str = ""


def coefficient_match(expr: AffinePolynomial, basis: MonomialBasis, first_var: int,
                      label: str = "") -> tuple[list[Equality], GramBlock]:
    """Equalities ``coef_mu(expr) = sum_{m_i m_j = mu} Q_ij`` for a fresh Gram block."""
    if basis.variables != expr.variables:
        raise ValueError("basis and expression use different variable tuples")
    block = GramBlock(label, basis, first_var)
    products = basis.products
    missing = [m for m in expr.terms if m not in products]
    if missing:
        raise BasisError(f"{label or 'expression'}: monomial {missing[0]} is not a product of basis "
                         f"elements {basis}; extend the basis")
    rows = []
    for mono in sorted(set(products) | set(expr.terms), key=lambda e: (sum(e), e)):
        row: dict[int, float] = {}
        for i, j in products.get(mono, ()):
            row[block.index(i, j)] = row.get(block.index(i, j), 0.0) + (1.0 if i == j else 2.0)
        coef = expr.terms.get(mono, {})
        for k, v in coef.items():
            if k != CONST:
                row[k] = row.get(k, 0.0) - v
        rows.append(Equality({k: v for k, v in row.items() if v != 0.0}, coef.get(CONST, 0.0),
                             f"{label}{list(mono)}"))
    return rows, block


@dataclass
class SosProgram:
    """Decision variables, Gram blocks and affine equalities of one SOS feasibility problem."""

    n_vars: int = 0
    free: dict[str, list[int]] = field(default_factory=dict)  # label -> variable indices
    blocks: list[GramBlock] = field(default_factory=list)
    equalities: list[Equality] = field(default_factory=list)
    # certificate layout (set by build_sos_program)
    state_vars: tuple[str, ...] = ()
    barrier_template: tuple[tuple[str, ...], tuple[Exponent, ...], int] | None = None
    strategy_templates: dict[str, tuple[tuple[str, ...], tuple[Exponent, ...], int]] = field(default_factory=dict)
    epsilon: float = 0.0
    scaling: dict[str, tuple[float, float]] = field(default_factory=dict)  # x = center + radius * y
    fixed_strategies: dict[str, Polynomial] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def new_free(self, label: str, count: int) -> int:
        first = self.n_vars
        self.free[label] = list(range(first, first + count))
        self.n_vars += count
        return first

    def add_sos(self, expr: AffinePolynomial, label: str, max_degree: int | None = None,
                basis: MonomialBasis | None = None) -> GramBlock:
        """Require ``expr`` to be SOS; the default basis has all monomials up to half its degree."""
        deg = max(expr.degree(), 0)
        if max_degree is not None and deg > max_degree:
            raise DegreeDeficitError(f"{label}: expression has degree {deg}, above the bound {max_degree}")
        if basis is None:
            basis = MonomialBasis.up_to(expr.variables, math.ceil(deg / 2))
        rows, block = coefficient_match(expr, basis, self.n_vars, label)
        self.n_vars += block.n_entries
        self.blocks.append(block)
        self.equalities.extend(rows)
        return block

    def new_sos_polynomial(self, variables: tuple[str, ...], degree: int, label: str) -> AffinePolynomial:
        """A fresh SOS polynomial ``m^T Q m`` of the given (even) degree, as an affine polynomial."""
        basis = MonomialBasis.up_to(variables, degree // 2)
        block = GramBlock(label, basis, self.n_vars)
        self.n_vars += block.n_entries
        self.blocks.append(block)
        terms: dict[Exponent, dict[int, float]] = {}
        for mono, pairs in basis.products.items():
            terms[mono] = {block.index(i, j): (1.0 if i == j else 2.0) for i, j in pairs}
        return AffinePolynomial(variables, terms)

    # -- SDP assembly ------------------------------------------------------

    def free_indices(self) -> list[int]:
        return sorted(k for ks in self.free.values() for k in ks)

    def to_sdp(self) -> SdpProblem:
        free = self.free_indices()
        pos = {k: n for n, k in enumerate(free)}
        n_free = len(free)
        sizes = tuple(len(b.basis) for b in self.blocks)
        offsets, off = [], n_free
        for s in sizes:
            offsets.append(off)
            off += s * s
        # decision variable -> list of (column, weight)
        cols: dict[int, list[tuple[int, float]]] = {k: [(pos[k], 1.0)] for k in free}
        for blk, o in zip(self.blocks, offsets):
            n = len(blk.basis)
            for i in range(n):
                for j in range(i, n):
                    k = blk.index(i, j)
                    if i == j:
                        cols[k] = [(o + i + j * n, 1.0)]
                    else:
                        cols[k] = [(o + i + j * n, 0.5), (o + j + i * n, 0.5)]
        rows, cidx, vals = [], [], []
        for r, eq in enumerate(self.equalities):
            for k, v in eq.coeffs.items():
                for col, w in cols[k]:
                    rows.append(r)
                    cidx.append(col)
                    vals.append(v * w)
        A = sparse.csr_matrix((vals, (rows, cidx)), shape=(len(self.equalities), off))
        b = np.array([eq.rhs for eq in self.equalities])
        return SdpProblem(A, b, np.zeros(off), n_free, 0, sizes)

    def values_from(self, x: np.ndarray) -> np.ndarray:
        """Map a solution of :meth:`to_sdp` back to the decision-variable vector."""
        prob_sizes = [len(b.basis) for b in self.blocks]
        free = self.free_indices()
        vals = np.zeros(self.n_vars)
        vals[free] = x[:len(free)]
        off = len(free)
        for blk, n in zip(self.blocks, prob_sizes):
            M = x[off:off + n * n].reshape((n, n), order="F")
            M = 0.5 * (M + M.T)
            for i in range(n):
                for j in range(i, n):
                    vals[blk.index(i, j)] = M[i, j]
            off += n * n
        return vals

    def gram_matrices(self, x: np.ndarray) -> list[np.ndarray]:
        vals = self.values_from(x)
        return [b.matrix(vals) for b in self.blocks]

    def summary(self) -> dict:
        return {
            "decision_variables": self.n_vars,
            "free_variables": len(self.free_indices()),
            "gram_blocks": [len(b.basis) for b in self.blocks],
            "equalities": len(self.equalities),
            "epsilon": self.epsilon,
            "notes": list(self.notes),
        }


# -- building the certificate program ------------------------------------------

def _scaling_for(aug: AugmentedSystem) -> dict[str, tuple[float, float]]:
    box = dict(aug.state_box())
    if aug.input_vars:
        box.update(aug.input_box())
    out = {}
    for v, (lo, hi) in box.items():
        if math.isfinite(lo) and math.isfinite(hi) and hi > lo:
            out[v] = (0.5 * (lo + hi), 0.5 * (hi - lo))
    return out


def _to_scaled(p: Polynomial, scaling: Mapping[str, tuple[float, float]]) -> Polynomial:
    sub = {v: Polynomial.constant(c) + Polynomial.var(v) * r for v, (c, r) in scaling.items() if v in p.variables}
    return p.substitute(sub) if sub else p


def _from_scaled(p: Polynomial, scaling: Mapping[str, tuple[float, float]]) -> Polynomial:
    sub = {v: (Polynomial.var(v) - c) * (1.0 / r) for v, (c, r) in scaling.items() if v in p.variables}
    return p.substitute(sub) if sub else p


def _scaled_system(aug: AugmentedSystem, scaling) -> tuple[tuple[Polynomial, ...], BasicSet, BasicSet]:
    f = []
    for v, fi in zip(aug.state_vars, aug.f):
        c, r = scaling.get(v, (0.0, 1.0))
        f.append((_to_scaled(fi, scaling) - c) * (1.0 / r))
    xs = BasicSet(tuple(_to_scaled(g, scaling) for g in aug.state_set.gs), aug.state_set.dim_vars)
    ws = BasicSet(tuple(_to_scaled(g, scaling) for g in aug.input_set.gs), aug.input_set.dim_vars)
    return tuple(f), _with_interval_products(xs), _with_interval_products(ws)


def _with_interval_products(bset: BasicSet) -> BasicSet:
    """Add the redundant ``(v - lo)(hi - v) >= 0`` for every bounded variable.

    Linear interval constraints alone cannot give multipliers any curvature
    in ``v``; the product form can.
    """
    box = bset.box() or {}
    extra = []
    for v in bset.dim_vars:
        lo, hi = box.get(v, (-math.inf, math.inf))
        if math.isfinite(lo) and math.isfinite(hi):
            x = Polynomial.var(v)
            g = (x - lo) * (hi - x)
            if g not in bset.gs:
                extra.append(g)
    return BasicSet(tuple(bset.gs) + tuple(extra), bset.dim_vars) if extra else bset


def _template_monomials(variables: tuple[str, ...], degree: int) -> tuple[Exponent, ...]:
    return tuple(monomials_up_to(variables, degree))


def _lift_template(variables: tuple[str, ...], monos, first: int, universe: tuple[str, ...]) -> AffinePolynomial:
    """Template over ``variables`` re-expressed over the (larger) ``universe``."""
    idx = [universe.index(v) for v in variables]
    out = {}
    for k, m in enumerate(monos):
        full = [0] * len(universe)
        for i, e in zip(idx, m):
            full[i] = e
        out[tuple(full)] = {first + k: 1.0}
    return AffinePolynomial(universe, out)


def _sos_multiplier_sum(prog: SosProgram, gs: Sequence[Polynomial], universe: tuple[str, ...], degree: int,
                        label: str) -> AffinePolynomial:
    total = AffinePolynomial(universe)
    for n, g in enumerate(gs):
        if g.is_constant() and g.constant_term() >= 0:
            continue  # a nonnegative constant constraint adds nothing
        lam = prog.new_sos_polynomial(universe, degree, f"{label}.lambda{n}")
        total.add_inplace(lam.mul_polynomial(g))
    return total


def _restricted(gs: Sequence[Polynomial], names: Sequence[str]) -> list[Polynomial]:
    allowed = set(names)
    return [g for g in gs if set(g.variables) <= allowed]


def build_sos_program(cis: Sequence[ConditionalInvariance], aug: AugmentedSystem, prefix: Sequence[str],
                      degrees: SosDegrees = SosDegrees(), epsilon: float = 0.01,
                      enforce_input_feasibility: bool = True, normalize: bool = True,
                      fixed_strategies: Mapping[str, Polynomial] | None = None) -> SosProgram:
    """One program whose feasibility yields a single certificate common to all ``cis``.

    With ``normalize`` every bounded variable is mapped affinely onto
    ``[-1, 1]`` before building the program (for conditioning); the
    reconstructed certificate is mapped back. With
    ``enforce_input_feasibility`` each strategy is also required to stay in
    the input set wherever the universal variables range over their sets.

    ``fixed_strategies`` replaces the strategy templates by given
    polynomials. They are substituted into the dynamics, so the decrease
    condition is imposed exactly at ``w_e = h_e`` and the ``(w_e - h_e)``
    relaxation term disappears; only ``B`` and the multipliers remain free.
    """
    prefix = tuple(prefix)
    if len(prefix) != aug.p:
        raise ValueError(f"prefix has {len(prefix)} quantifiers for {aug.p} copies")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    prog = SosProgram(state_vars=tuple(aug.state_vars), epsilon=float(epsilon))
    scaling = _scaling_for(aug) if normalize else {}
    prog.scaling = scaling
    f, xset, wset = _scaled_system(aug, scaling)

    exist = existential_inputs(aug, prefix)
    if fixed_strategies is not None:
        missing = set(exist) - set(fixed_strategies)
        if missing:
            raise ValueError(f"fixed strategies missing for {sorted(missing)}")
        fixed = {w: _scaled_strategy(fixed_strategies[w], w, scaling) for w in exist}
        prog.fixed_strategies = {w: fixed_strategies[w] for w in exist}
        f = tuple(fi.substitute(fixed) for fi in f)
        wset = BasicSet(tuple(g for g in wset.gs if not set(g.variables) & set(exist)),
                        tuple(v for v in wset.dim_vars if v not in exist))
        exist = []

    xs = tuple(sorted(aug.state_vars))
    ws_all = tuple(w for w in aug.input_vars if fixed_strategies is None or w not in fixed_strategies)
    universe14 = tuple(sorted(aug.state_vars + ws_all))

    # barrier template
    b_monos = _template_monomials(xs, degrees.barrier)
    b_first = prog.new_free("B", len(b_monos))
    prog.barrier_template = (xs, b_monos, b_first)
    B = AffinePolynomial.template(b_monos, b_first, xs)

    # strategy templates
    for w in exist:
        copy = int(w.rsplit("__", 1)[1])
        args = tuple(sorted(strategy_arguments(aug, prefix, copy)))
        monos = _template_monomials(args, degrees.strategy)
        first = prog.new_free(f"h[{w}]", len(monos))
        prog.strategy_templates[w] = (args, monos, first)

    mult = degrees.multiplier

    # conditions on A and B, per clause
    for k, ci in enumerate(cis):
        for side, region in (("initial", ci.set_a), ("unsafe", ci.set_b)):
            for n, clause in enumerate(region.nonempty_clauses()):
                gs = [_to_scaled(g, scaling) for g in clause.gs] + list(xset.gs)
                extra = {v for g in gs for v in g.variables} - set(xs)
                if extra:
                    raise ValueError(f"{side} region of condition {k} uses non-state variables {sorted(extra)}")
                expr = (-B) if side == "initial" else B.copy()
                expr = expr - _sos_multiplier_sum(prog, gs, xs, mult, f"{side}[{k}.{n}]")
                if side == "unsafe":
                    expr.add_constant_poly(Polynomial.constant(epsilon), -1.0)
                prog.add_sos(expr, f"{side}[{k}.{n}]", degrees.master)

    # decrease condition, shared by all conditional invariances
    composed = AffinePolynomial(universe14)
    f_map = dict(zip(aug.state_vars, f))
    for j, mono in enumerate(b_monos):
        image = Polynomial.constant(1.0)
        for v, e in zip(xs, mono):
            if e:
                image = image * f_map[v] ** e
        term = AffinePolynomial.from_polynomial(image, universe14)
        term = AffinePolynomial(universe14, {m: {b_first + j: c[CONST]} for m, c in term.terms.items()})
        composed.add_inplace(term)
    B14 = _lift_template(xs, b_monos, b_first, universe14)
    expr = B14 - composed
    expr = expr - _sos_multiplier_sum(prog, list(xset.gs), universe14, mult, "decrease.state")
    expr = expr - _sos_multiplier_sum(prog, list(wset.gs), universe14, mult, "decrease.input")
    for w in exist:
        args, monos, first = prog.strategy_templates[w]
        expr.add_constant_poly(Polynomial.var(w), -1.0)
        expr.add_inplace(_lift_template(args, monos, first, universe14))
    prog.add_sos(expr, "decrease", degrees.master)

    if enforce_input_feasibility:
        _add_feasibility(prog, aug, prefix, xset, wset, mult, degrees)
    return prog


def _add_feasibility(prog: SosProgram, aug: AugmentedSystem, prefix, xset: BasicSet, wset: BasicSet,
                     mult: int, degrees: SosDegrees) -> None:
    """``g_in(h) - sum sigma_i g_i`` SOS for input constraints that are affine in existential inputs."""
    exist = set(prog.strategy_templates)
    for n, g in enumerate(wset.gs):
        targets = sorted(set(g.variables) & exist)
        if not targets:
            continue
        if any(g.degree_in(w) > 1 for w in targets) or _has_cross_terms(g, targets):
            prog.notes.append(f"input constraint {g} is not affine in the strategies; feasibility left to sampling")
            continue
        args = sorted({a for w in targets for a in prog.strategy_templates[w][0]} |
                      (set(g.variables) - exist))
        universe = tuple(sorted(args))
        rest, linear = _split_affine(g, targets)
        expr = AffinePolynomial.from_polynomial(rest, universe)
        for w in targets:
            t_args, monos, first = prog.strategy_templates[w]
            h = _lift_template(t_args, monos, first, universe)
            expr.add_inplace(h.mul_polynomial(linear[w]))
        gs = _restricted(list(xset.gs) + [gi for gi in wset.gs if not set(gi.variables) & exist], universe)
        expr = expr - _sos_multiplier_sum(prog, gs, universe, mult, f"feasibility[{n}]")
        prog.add_sos(expr, f"feasibility[{n}]", degrees.master)


def _has_cross_terms(g: Polynomial, targets: Sequence[str]) -> bool:
    idx = [g.variables.index(w) for w in targets]
    return any(sum(exp[i] for i in idx) > 1 for exp in g.terms)


def _split_affine(g: Polynomial, targets: Sequence[str]) -> tuple[Polynomial, dict[str, Polynomial]]:
    """``g = rest + sum_w linear[w] * w`` with ``rest`` and ``linear[w]`` free of the targets."""
    zero = {w: 0.0 for w in targets}
    rest = g.substitute(zero)
    linear = {}
    for w in targets:
        others = {u: 0.0 for u in targets if u != w}
        gw = g.substitute(others)
        linear[w] = gw.substitute({w: 1.0}) - gw.substitute({w: 0.0})
    return rest, linear


def _scaled_strategy(h: Polynomial, w: str, scaling) -> Polynomial:
    c, r = scaling.get(w, (0.0, 1.0))
    return (_to_scaled(h, scaling) - c) * (1.0 / r)


def strategy_candidates(aug: AugmentedSystem, prefix: Sequence[str], limit: int = 8) -> list[dict[str, Polynomial]]:
    """Simple fixed strategies to try: copy an earlier universal input, or sit at the centre of the input box."""
    prefix = tuple(prefix)
    exist = existential_inputs(aug, prefix)
    if not exist:
        return [{}]
    box = aug.input_box() if aug.input_vars else {}
    options: list[list[Polynomial]] = []
    for w in exist:
        base, copy = w.rsplit("__", 1)
        opts = [Polynomial.var(f"{base}__{k}") for k in range(1, int(copy))
                if prefix[k - 1] == "forall" and f"{base}__{k}" in aug.input_vars]
        lo, hi = box.get(w, (-math.inf, math.inf))
        centre = 0.5 * (lo + hi) if math.isfinite(lo) and math.isfinite(hi) else 0.0
        opts.append(Polynomial.constant(centre))
        options.append(opts)
    out = []
    for combo in itertools.product(*options):
        out.append(dict(zip(exist, combo)))
        if len(out) >= limit:
            break
    return out


def unscale(p: Polynomial, prog: SosProgram) -> Polynomial:
    return _from_scaled(p, prog.scaling)


def scale_strategy(h: Polynomial, w: str, prog: SosProgram) -> Polynomial:
    """Map a strategy found in normalized coordinates back to the original input scale."""
    c, r = prog.scaling.get(w, (0.0, 1.0))
    return _from_scaled(h, prog.scaling) * r + c
