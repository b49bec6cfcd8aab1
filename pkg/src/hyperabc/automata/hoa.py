"""Reading and writing automata in the HOA v1 text format.

Supported: one initial state, explicit edge labels, state-based acceptance
with ``Buchi`` (``Inf(0)``) or ``Rabin`` (``(Fin(b)&Inf(g))|...``)
conditions. Atomic propositions are named like ``a3[p1,p2]`` or resolved
through a caller-supplied table. The optional custom header
``exclusive: i j ...`` declares AP indices that are never true together.
"""

from __future__ import annotations

import re
from typing import Mapping

from ..formula.syntax import Atom
from .buchi import BuchiAutomaton, Edge, RabinAutomaton
from .guards import FALSE, TRUE, Alphabet, Guard, atom_from_name


class HoaError(ValueError):
    pass


# -- export ----------------------------------------------------------------

def _label(g: Guard, index: Mapping[Atom, int]) -> str:
    if g.is_true:
        return "t"
    if g.is_false:
        return "f"
    cubes = []
    for cube in sorted(g.cubes, key=lambda c: sorted((index[a], v) for a, v in c)):
        lits = sorted(cube, key=lambda l: index[l[0]])
        text = "&".join(("" if v else "!") + str(index[a]) for a, v in lits)
        cubes.append(text if len(lits) <= 1 or len(g.cubes) == 1 else f"({text})")
    return " | ".join(cubes)


def hoa_export(aut: BuchiAutomaton, name: str | None = None) -> str:
    order = {q: i for i, q in enumerate(aut.states)}
    aps = sorted(aut.all_atoms())
    index = {a: i for i, a in enumerate(aps)}
    lines = ["HOA: v1"]
    if name:
        lines.append(f'name: "{name}"')
    lines.append(f"States: {len(aut.states)}")
    if aut.states:
        lines.append(f"Start: {order[aut.initial]}")
    lines.append(f"AP: {len(aps)}" + "".join(f' "{a}"' for a in aps))
    if isinstance(aut, RabinAutomaton):
        h = len(aut.pairs)
        lines.append(f"acc-name: Rabin {h}")
        cond = "|".join(f"(Fin({2 * j})&Inf({2 * j + 1}))" for j in range(h)) or "f"
        lines.append(f"Acceptance: {2 * h} {cond}")
    else:
        lines.append("acc-name: Buchi")
        lines.append("Acceptance: 1 Inf(0)")
    lines.append("properties: trans-labels explicit-labels state-acc")
    for group in aut.alphabet.exclusive:
        idx = sorted(index[a] for a in group if a in index)
        if idx:
            lines.append("exclusive: " + " ".join(map(str, idx)))
    lines.append("--BODY--")
    names = dict(aut.names)
    for q in aut.states:
        marks = _state_marks(aut, q)
        head = f"State: {order[q]}"
        if q in names:
            head += f' "{names[q]}"'
        if marks:
            head += " {" + " ".join(map(str, marks)) + "}"
        lines.append(head)
        for e in aut.out(q):
            lines.append(f"[{_label(e.guard, index)}] {order[e.dst]}")
    lines.append("--END--")
    return "\n".join(lines) + "\n"


def _state_marks(aut: BuchiAutomaton, q: int) -> list[int]:
    if isinstance(aut, RabinAutomaton):
        marks = []
        for j, (good, bad) in enumerate(aut.pairs):
            if q in bad:
                marks.append(2 * j)
            if q in good:
                marks.append(2 * j + 1)
        return marks
    return [0] if q in aut.accepting else []


# -- import ----------------------------------------------------------------

_HEADER_TOKEN = re.compile(r'\s*(?:"((?:[^"\\]|\\.)*)"|([^\s"]+))')


def _header_values(text: str) -> list[str]:
    out, pos = [], 0
    while pos < len(text) and text[pos:].strip():
        m = _HEADER_TOKEN.match(text, pos)
        out.append(m.group(1) if m.group(1) is not None else m.group(2))
        pos = m.end()
    return out


def _parse_acceptance(values: list[str]) -> tuple[str, list[tuple[int, int]]]:
    """Returns ("buchi", [(-1, 0)]) or ("rabin", [(fin, inf), ...])."""
    if not values:
        raise HoaError("empty Acceptance header")
    cond = "".join(values[1:]).replace(" ", "")
    if re.fullmatch(r"Inf\((\d+)\)", cond):
        return "buchi", [(-1, int(re.fullmatch(r"Inf\((\d+)\)", cond).group(1)))]
    pairs = []
    for part in cond.split("|"):
        m = re.fullmatch(r"\(?Fin\((\d+)\)&Inf\((\d+)\)\)?", part)
        if not m:
            raise HoaError(f"unsupported acceptance condition {cond!r} (only Buchi and Rabin)")
        pairs.append((int(m.group(1)), int(m.group(2))))
    return "rabin", pairs


class _LabelParser:
    _TOK = re.compile(r"\s*(\d+|[tf!&|()]|@\w+)")

    def __init__(self, text: str, atoms: list[Atom], alphabet: Alphabet):
        self.tokens = []
        pos = 0
        while pos < len(text) and text[pos:].strip():
            m = self._TOK.match(text, pos)
            if not m:
                raise HoaError(f"bad label {text!r}")
            self.tokens.append(m.group(1))
            pos = m.end()
        self.i = 0
        self.atoms = atoms
        self.alphabet = alphabet
        self.text = text

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def parse(self) -> Guard:
        g = self.disj()
        if self.peek() is not None:
            raise HoaError(f"trailing tokens in label {self.text!r}")
        return g

    def disj(self):
        g = self.conj()
        while self.peek() == "|":
            self.i += 1
            g = g.disj(self.conj(), self.alphabet)
        return g

    def conj(self):
        g = self.unary()
        while self.peek() == "&":
            self.i += 1
            g = g.conj(self.unary(), self.alphabet)
        return g

    def unary(self):
        tok = self.peek()
        if tok is None:
            raise HoaError(f"unexpected end of label {self.text!r}")
        self.i += 1
        if tok == "!":
            return self.unary().neg(self.alphabet)
        if tok == "(":
            g = self.disj()
            if self.peek() != ")":
                raise HoaError(f"missing ')' in label {self.text!r}")
            self.i += 1
            return g
        if tok == "t":
            return TRUE
        if tok == "f":
            return FALSE
        if tok.startswith("@"):
            raise HoaError("label aliases are not supported")
        k = int(tok)
        if k >= len(self.atoms):
            raise HoaError(f"AP index {k} out of range")
        return Guard.literal(self.atoms[k])


def hoa_import(text: str, ap_map: Mapping[str, Atom] | None = None,
               atom_arity: Mapping[str, int] | None = None) -> BuchiAutomaton | RabinAutomaton:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("/*")]
    try:
        body_at = next(i for i, ln in enumerate(lines) if ln.strip() == "--BODY--")
    except StopIteration:
        raise HoaError("missing --BODY--") from None
    headers: list[tuple[str, list[str]]] = []
    for ln in lines[:body_at]:
        if ":" not in ln:
            raise HoaError(f"malformed header line {ln!r}")
        key, rest = ln.split(":", 1)
        headers.append((key.strip(), _header_values(rest)))
    keys = [k for k, _ in headers]
    if not keys or keys[0] != "HOA" or headers[0][1] != ["v1"]:
        raise HoaError("expected 'HOA: v1' as the first header")
    hdr = {k: v for k, v in headers}
    n_states = int(hdr.get("States", ["0"])[0])
    starts = [v for k, v in headers if k == "Start"]
    if len(starts) > 1 or (starts and len(starts[0]) != 1):
        raise HoaError("exactly one initial state is supported")
    initial = int(starts[0][0]) if starts else 0

    ap_values = hdr.get("AP", ["0"])
    names = ap_values[1:]
    if int(ap_values[0]) != len(names):
        raise HoaError("AP count does not match the listed names")
    atoms = []
    for nm in names:
        atom = (ap_map or {}).get(nm) or atom_from_name(nm)
        if atom is None:
            raise HoaError(f"unknown atomic proposition {nm!r}")
        if atom_arity is not None and atom_arity.get(atom.name) != len(atom.traces):
            raise HoaError(f"atomic proposition {nm!r} does not match the atom declarations")
        atoms.append(atom)

    groups = tuple(frozenset(atoms[int(i)] for i in v) for k, v in headers if k == "exclusive")
    alphabet = Alphabet(groups)

    if "Acceptance" not in hdr:
        raise HoaError("missing Acceptance header")
    kind, acc_pairs = _parse_acceptance(hdr["Acceptance"])
    acc_name = hdr.get("acc-name", [""])[0]
    if acc_name and acc_name not in ("Buchi", "Rabin"):
        raise HoaError(f"unsupported acceptance name {acc_name!r}")

    state_names: dict[int, str] = {}
    marks: dict[int, set[int]] = {}
    edges: list[Edge] = []
    current = None
    state_re = re.compile(r'^State:\s*(\d+)\s*(?:"([^"]*)")?\s*(?:\{([\d\s]*)\})?\s*$')
    edge_re = re.compile(r"^\[(.*)\]\s*(\d+)\s*(\{[\d\s]*\})?\s*$")
    for ln in lines[body_at + 1:]:
        s = ln.strip()
        if s == "--END--":
            break
        m = state_re.match(s)
        if m:
            current = int(m.group(1))
            if m.group(2) is not None:
                state_names[current] = m.group(2)
            marks[current] = {int(x) for x in (m.group(3) or "").split()}
            continue
        m = edge_re.match(s)
        if m:
            if current is None:
                raise HoaError("edge before any State: line")
            if m.group(3):
                raise HoaError("transition-based acceptance marks are not supported")
            guard = _LabelParser(m.group(1), atoms, alphabet).parse()
            edges.append(Edge(current, int(m.group(2)), guard))
            continue
        raise HoaError(f"cannot parse body line {s!r} (implicit labels are not supported)")

    states = tuple(range(n_states))
    for q in set(marks) | {e.src for e in edges} | {e.dst for e in edges}:
        if q >= n_states:
            raise HoaError(f"state {q} exceeds States: {n_states}")
    names_t = tuple(sorted(state_names.items()))
    if kind == "buchi" and acc_name != "Rabin":
        inf = acc_pairs[0][1]
        accepting = frozenset(q for q, ms in marks.items() if inf in ms)
        return BuchiAutomaton(states, initial, tuple(edges), accepting, alphabet, names_t, tuple(atoms))
    pairs = []
    for fin, inf in acc_pairs:
        good = frozenset(q for q, ms in marks.items() if inf in ms)
        bad = frozenset(q for q, ms in marks.items() if fin in ms)
        pairs.append((good, bad))
    return RabinAutomaton(states, initial, tuple(edges), frozenset(), alphabet, names_t, tuple(atoms),
                          pairs=tuple(pairs))
