"""Sparse multivariate polynomials over named variables.

Coefficients are 64-bit floats. A polynomial only keeps the variables that
actually occur with a nonzero exponent, so two equal polynomials always have
the same variable tuple and the same term map.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

import numpy as np

Exponent = tuple[int, ...]


class Polynomial:
    __slots__ = ("_vars", "_terms", "_hash")

    def __init__(self, variables: Sequence[str] = (), terms: Mapping[Exponent, float] | None = None):
        variables = tuple(variables)
        if list(variables) != sorted(set(variables)):
            raise ValueError(f"variables must be sorted and distinct: {variables}")
        clean: dict[Exponent, float] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != len(variables):
                raise ValueError("exponent length does not match variable count")
            if any(e < 0 for e in exp):
                raise ValueError("negative exponent")
            c = float(c)
            if c != 0.0:
                clean[exp] = clean.get(exp, 0.0) + c
                if clean[exp] == 0.0:
                    del clean[exp]
        self._vars, self._terms = _trim(variables, clean)
        self._hash = None

    # -- construction -----------------------------------------------------

    @classmethod
    def constant(cls, value: float) -> "Polynomial":
        return cls((), {(): value})

    @classmethod
    def var(cls, name: str) -> "Polynomial":
        return cls((name,), {(1,): 1.0})

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls()

    @classmethod
    def from_monomials(cls, items: Iterable[tuple[Mapping[str, int], float]]) -> "Polynomial":
        """Build from (``{var: power}``, coefficient) pairs."""
        items = list(items)
        names = sorted({v for m, _ in items for v, e in m.items() if e})
        index = {v: i for i, v in enumerate(names)}
        terms: dict[Exponent, float] = {}
        for mono, c in items:
            exp = [0] * len(names)
            for v, e in mono.items():
                if e:
                    exp[index[v]] += e
            key = tuple(exp)
            terms[key] = terms.get(key, 0.0) + c
        return cls(names, terms)

    # -- inspection -------------------------------------------------------

    @property
    def variables(self) -> tuple[str, ...]:
        return self._vars

    @property
    def terms(self) -> dict[Exponent, float]:
        return dict(self._terms)

    def items(self) -> list[tuple[Exponent, float]]:
        """Terms in canonical graded-lex order (highest degree first)."""
        return sorted(self._terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def monomials(self) -> list[tuple[dict[str, int], float]]:
        return [({v: e for v, e in zip(self._vars, exp) if e}, c) for exp, c in self.items()]

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._vars

    def constant_term(self) -> float:
        return self._terms.get(tuple(0 for _ in self._vars), 0.0)

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def degree_in(self, name: str) -> int:
        if name not in self._vars:
            return 0
        i = self._vars.index(name)
        return max(e[i] for e in self._terms)

    def coefficient(self, mono: Mapping[str, int]) -> float:
        if any(e and v not in self._vars for v, e in mono.items()):
            return 0.0
        exp = tuple(mono.get(v, 0) for v in self._vars)
        return self._terms.get(exp, 0.0)

    # -- arithmetic -------------------------------------------------------

    def _aligned(self, other: "Polynomial"):
        names = tuple(sorted(set(self._vars) | set(other._vars)))
        return names, _lift(self, names), _lift(other, names)

    def __add__(self, other):
        other = _coerce(other)
        names, a, b = self._aligned(other)
        out = dict(a)
        for exp, c in b.items():
            out[exp] = out.get(exp, 0.0) + c
        return Polynomial(names, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self._vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        names, a, b = self._aligned(other)
        out: dict[Exponent, float] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                key = tuple(x + y for x, y in zip(ea, eb))
                out[key] = out.get(key, 0.0) + ca * cb
        return Polynomial(names, out)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float):
        return self * (1.0 / float(scalar))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = Polynomial.constant(1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._vars == other._vars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._vars, frozenset(self._terms.items())))
        return self._hash

    def allclose(self, other: "Polynomial", atol: float = 1e-12, rtol: float = 1e-9) -> bool:
        diff = self - other
        scale = max([abs(c) for c in self._terms.values()] + [abs(c) for c in other._terms.values()] + [0.0])
        return all(abs(c) <= atol + rtol * scale for c in diff._terms.values())

    # -- evaluation -------------------------------------------------------

    def eval(self, point: Mapping[str, float]) -> float:
        missing = [v for v in self._vars if v not in point]
        if missing:
            raise KeyError(f"point does not assign variable(s) {', '.join(missing)}")
        xs = [float(point[v]) for v in self._vars]
        total = 0.0
        for exp, c in self.items():
            term = c
            for x, e in zip(xs, exp):
                if e:
                    term *= x**e
            total += term
        return total

    __call__ = eval

    def eval_batch(self, columns: Mapping[str, np.ndarray]) -> np.ndarray:
        """Vectorised evaluation; ``columns`` maps variable names to equal-length arrays."""
        missing = [v for v in self._vars if v not in columns]
        if missing:
            raise KeyError(f"missing variable(s) {', '.join(missing)}")
        n = len(next(iter(columns.values()))) if columns else 1
        total = np.zeros(n)
        for exp, c in self.items():
            term = np.full(n, c)
            for v, e in zip(self._vars, exp):
                if e:
                    term = term * np.asarray(columns[v], dtype=float) ** e
            total = total + term
        return total

    # -- composition ------------------------------------------------------

    def substitute(self, sub: Mapping[str, "Polynomial | float"]) -> "Polynomial":
        """Replace variables by polynomials; variables absent from ``sub`` are kept."""
        images = []
        for v in self._vars:
            if v in sub:
                images.append(_coerce(sub[v]))
            else:
                images.append(Polynomial.var(v))
        powers: list[dict[int, Polynomial]] = [{0: Polynomial.constant(1.0), 1: img} for img in images]

        def power(i: int, e: int) -> Polynomial:
            cache = powers[i]
            if e not in cache:
                cache[e] = power(i, e - 1) * images[i]
            return cache[e]

        out = Polynomial()
        for exp, c in self.items():
            term = Polynomial.constant(c)
            for i, e in enumerate(exp):
                if e:
                    term = term * power(i, e)
            out = out + term
        return out

    def rename(self, mapping: Mapping[str, str]) -> "Polynomial":
        names = [mapping.get(v, v) for v in self._vars]
        if len(set(names)) != len(names):
            return self.substitute({v: Polynomial.var(mapping[v]) for v in self._vars if v in mapping})
        order = sorted(range(len(names)), key=lambda i: names[i])
        terms = {tuple(exp[i] for i in order): c for exp, c in self._terms.items()}
        return Polynomial([names[i] for i in order], terms)

    # -- text -------------------------------------------------------------

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"Polynomial({to_text(self)!r})"


def _coerce(x) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, (int, float, np.floating, np.integer)):
        return Polynomial.constant(float(x))
    raise TypeError(f"cannot treat {type(x).__name__} as a polynomial")


def _lift(p: Polynomial, names: tuple[str, ...]) -> dict[Exponent, float]:
    if p._vars == names:
        return p._terms
    pos = [names.index(v) for v in p._vars]
    out = {}
    for exp, c in p._terms.items():
        full = [0] * len(names)
        for i, e in zip(pos, exp):
            full[i] = e
        out[tuple(full)] = c
    return out


def _trim(variables: tuple[str, ...], terms: dict[Exponent, float]):
    used = [i for i in range(len(variables)) if any(exp[i] for exp in terms)]
    if len(used) == len(variables):
        return variables, terms
    names = tuple(variables[i] for i in used)
    trimmed: dict[Exponent, float] = {}
    for exp, c in terms.items():
        key = tuple(exp[i] for i in used)
        trimmed[key] = trimmed.get(key, 0.0) + c
    return names, {k: v for k, v in trimmed.items() if v != 0.0}


def _grlex_key(exp: Exponent):
    return (sum(exp), exp)


def _format_coeff(c: float) -> str:
    if math.isfinite(c) and c == int(c) and abs(c) < 1e16:
        return repr(float(c)).removesuffix(".0")
    return repr(float(c))


def to_text(p: Polynomial) -> str:
    """Canonical serialisation: graded-lex order, explicit ``*`` and ``^``."""
    if p.is_zero():
        return "0"
    parts = []
    for exp, c in p.items():
        factors = []
        for v, e in zip(p.variables, exp):
            if e == 1:
                factors.append(v)
            elif e > 1:
                factors.append(f"{v}^{e}")
        mag = abs(c)
        if factors:
            body = "*".join(factors) if mag == 1.0 else _format_coeff(mag) + "*" + "*".join(factors)
        else:
            body = _format_coeff(mag)
        sign = "-" if c < 0 else "+"
        if not parts:
            parts.append(body if sign == "+" else "-" + body)
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)


def monomials_up_to(variables: Sequence[str], degree: int) -> list[Exponent]:
    """All exponent vectors over ``variables`` of total degree <= ``degree``, graded-lex ascending."""
    n = len(variables)
    out: list[Exponent] = []

    def rec(prefix: list[int], remaining: int, i: int):
        if i == n:
            out.append(tuple(prefix))
            return
        for e in range(remaining + 1):
            prefix.append(e)
            rec(prefix, remaining - e, i + 1)
            prefix.pop()

    if degree < 0:
        return []
    rec([], degree, 0)
    out.sort(key=_grlex_key)
    return out


def _sorted_poly(variables: Sequence[str], terms: Mapping[Exponent, float]) -> Polynomial:
    """Build a polynomial from exponents over an arbitrarily ordered variable tuple."""
    order = sorted(range(len(variables)), key=lambda i: variables[i])
    out: dict[Exponent, float] = {}
    for exp, c in terms.items():
        key = tuple(exp[i] for i in order)
        out[key] = out.get(key, 0.0) + c
    return Polynomial(tuple(variables[i] for i in order), out)
