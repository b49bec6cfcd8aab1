from __future__ import annotations

from dataclasses import dataclass

from .syntax import HyperLTLFormula, Quantifier


@dataclass(frozen=True)
class FragmentClass:
    """Shape of a quantifier prefix.

    ``kind`` is one of ``all-universal``, ``all-existential``,
    ``forall-exists`` or ``general``. ``universal`` counts the leading
    universal quantifiers.
    """

    kind: str
    universal: int
    alternations: int

    @property
    def is_forall_exists(self) -> bool:
        return self.kind != "general"


def classify_prefix(prefix: tuple[Quantifier, ...] | list[str]) -> FragmentClass:
    kinds = [q.kind if isinstance(q, Quantifier) else q for q in prefix]
    alternations = sum(1 for a, b in zip(kinds, kinds[1:]) if a != b)
    leading = 0
    while leading < len(kinds) and kinds[leading] == "forall":
        leading += 1
    if leading == len(kinds):
        kind = "all-universal"
    elif leading == 0 and all(k == "exists" for k in kinds):
        kind = "all-existential"
    elif all(k == "exists" for k in kinds[leading:]):
        kind = "forall-exists"
    else:
        kind = "general"
    return FragmentClass(kind, leading, alternations)


def classify(f: HyperLTLFormula) -> FragmentClass:
    return classify_prefix(f.prefix)
