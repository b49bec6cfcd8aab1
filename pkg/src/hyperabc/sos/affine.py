"""Polynomials whose coefficients are affine in SDP decision variables."""

from __future__ import annotations

from typing import Mapping, Sequence

from ..polysys import Polynomial
from ..polysys.polynomial import Exponent, _lift, _sorted_poly

CONST = -1  # key of the constant part in an affine coefficient

Affine = dict[int, float]


def _add_into(dst: Affine, src: Mapping[int, float], scale: float = 1.0) -> None:
    for k, v in src.items():
        x = dst.get(k, 0.0) + scale * v
        if x == 0.0:
            dst.pop(k, None)
        else:
            dst[k] = x


class AffinePolynomial:
    """``sum_mu (c_mu + sum_k a_{mu,k} y_k) x^mu`` over a fixed variable tuple."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponent, Affine] | None = None):
        self.variables = tuple(variables)
        self.terms: dict[Exponent, Affine] = {}
        for exp, coef in (terms or {}).items():
            clean = {k: float(v) for k, v in coef.items() if v != 0.0}
            if clean:
                self.terms[tuple(exp)] = clean

    @classmethod
    def from_polynomial(cls, p: Polynomial, variables: Sequence[str]) -> "AffinePolynomial":
        variables = tuple(variables)
        _check_vars(p, variables)
        return cls(variables, {exp: {CONST: c} for exp, c in _lift(p, variables).items()})

    @classmethod
    def template(cls, monomials: Sequence[Exponent], first_var: int, variables: Sequence[str]) -> "AffinePolynomial":
        """``sum_k y_{first_var + k} x^{monomials[k]}``: a generic polynomial with unknown coefficients."""
        return cls(variables, {m: {first_var + k: 1.0} for k, m in enumerate(monomials)})

    def copy(self) -> "AffinePolynomial":
        return AffinePolynomial(self.variables, {e: dict(c) for e, c in self.terms.items()})

    def __add__(self, other: "AffinePolynomial") -> "AffinePolynomial":
        out = self.copy()
        out.add_inplace(other)
        return out

    def __sub__(self, other: "AffinePolynomial") -> "AffinePolynomial":
        out = self.copy()
        out.add_inplace(other, -1.0)
        return out

    def __neg__(self) -> "AffinePolynomial":
        return self.scale(-1.0)

    def scale(self, s: float) -> "AffinePolynomial":
        return AffinePolynomial(self.variables, {e: {k: s * v for k, v in c.items()} for e, c in self.terms.items()})

    def add_inplace(self, other: "AffinePolynomial", scale: float = 1.0) -> None:
        if other.variables != self.variables:
            raise ValueError("variable tuples differ")
        for exp, coef in other.terms.items():
            dst = self.terms.setdefault(exp, {})
            _add_into(dst, coef, scale)
            if not dst:
                del self.terms[exp]

    def add_constant_poly(self, p: Polynomial, scale: float = 1.0) -> None:
        _check_vars(p, self.variables)
        for exp, c in _lift(p, self.variables).items():
            dst = self.terms.setdefault(exp, {})
            _add_into(dst, {CONST: c}, scale)
            if not dst:
                del self.terms[exp]

    def mul_polynomial(self, p: Polynomial) -> "AffinePolynomial":
        _check_vars(p, self.variables)
        out: dict[Exponent, Affine] = {}
        factors = _lift(p, self.variables)
        for e1, coef in self.terms.items():
            for e2, c in factors.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                _add_into(out.setdefault(key, {}), coef, c)
        return AffinePolynomial(self.variables, out)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def decision_vars(self) -> set[int]:
        return {k for c in self.terms.values() for k in c if k != CONST}

    def evaluate(self, values: Sequence[float]) -> Polynomial:
        """The numeric polynomial obtained by fixing the decision variables."""
        terms = {}
        for exp, coef in self.terms.items():
            terms[exp] = sum(v * (1.0 if k == CONST else values[k]) for k, v in coef.items())
        return _sorted_poly(self.variables, terms)


def _check_vars(p: Polynomial, variables: tuple[str, ...]) -> None:
    extra = set(p.variables) - set(variables)
    if extra:
        raise ValueError(f"polynomial uses variables {sorted(extra)} outside {variables}")
