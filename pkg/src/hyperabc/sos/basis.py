"""Monomial bases for Gram-matrix representations."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from ..polysys import monomials_up_to
from ..polysys.polynomial import Exponent, _grlex_key


@dataclass(frozen=True)
class MonomialBasis:
    variables: tuple[str, ...]
    exponents: tuple[Exponent, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        exps = tuple(tuple(e) for e in self.exponents)
        if any(len(e) != len(self.variables) for e in exps):
            raise ValueError("exponent length does not match the variables")
        object.__setattr__(self, "exponents", tuple(sorted(set(exps), key=_grlex_key)))

    @classmethod
    def up_to(cls, variables: Sequence[str], degree: int) -> "MonomialBasis":
        return cls(tuple(variables), tuple(monomials_up_to(variables, degree)))

    def __len__(self):
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.exponents), default=-1)

    @cached_property
    def products(self) -> dict[Exponent, list[tuple[int, int]]]:
        """Monomial -> index pairs ``(i, j)``, ``i <= j``, with ``m_i * m_j`` equal to it."""
        out: dict[Exponent, list[tuple[int, int]]] = {}
        for i, a in enumerate(self.exponents):
            for j in range(i, len(self.exponents)):
                b = self.exponents[j]
                out.setdefault(tuple(x + y for x, y in zip(a, b)), []).append((i, j))
        return out

    def __str__(self):
        def mono(e):
            parts = [v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k]
            return "*".join(parts) or "1"
        return "[" + ", ".join(mono(e) for e in self.exponents) + "]"
