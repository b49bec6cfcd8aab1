"""Semidefinite programs in equality standard form and the SDPA sparse file format.

A problem is ``min c.x`` subject to ``A x = b`` where ``x`` stacks free
variables, nonnegative (LP) variables and the column-major vectorisations
of symmetric PSD blocks. In SDPA terms this is the dual problem
``max F0.Y s.t. Fk.Y = ck, Y >= 0``; free variables are written as the
difference of two entries of a diagonal block.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse


class SdpFormatError(ValueError):
    pass


@dataclass
class SdpProblem:
    A: sparse.csr_matrix
    b: np.ndarray
    c: np.ndarray
    n_free: int = 0
    n_lp: int = 0
    psd_sizes: tuple[int, ...] = ()

    def __post_init__(self):
        self.A = sparse.csr_matrix(self.A)
        self.b = np.asarray(self.b, dtype=float).ravel()
        self.c = np.asarray(self.c, dtype=float).ravel()
        self.psd_sizes = tuple(int(s) for s in self.psd_sizes)
        if self.A.shape != (len(self.b), self.n_vars):
            raise ValueError(f"A has shape {self.A.shape}, expected {(len(self.b), self.n_vars)}")
        if len(self.c) != self.n_vars:
            raise ValueError("objective length does not match the variable count")

    @property
    def n_vars(self) -> int:
        return self.n_free + self.n_lp + sum(s * s for s in self.psd_sizes)

    @property
    def n_constraints(self) -> int:
        return len(self.b)

    def block_offsets(self) -> list[int]:
        off, out = self.n_free + self.n_lp, []
        for s in self.psd_sizes:
            out.append(off)
            off += s * s
        return out

    def split(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
        x = np.asarray(x, dtype=float)
        free = x[:self.n_free]
        lp = x[self.n_free:self.n_free + self.n_lp]
        blocks = [x[o:o + s * s].reshape((s, s), order="F") for o, s in zip(self.block_offsets(), self.psd_sizes)]
        return free, lp, blocks

    def join(self, free, lp, blocks) -> np.ndarray:
        parts = [np.asarray(free, float).ravel(), np.asarray(lp, float).ravel()]
        parts += [np.asarray(B, float).ravel(order="F") for B in blocks]
        return np.concatenate(parts) if parts else np.zeros(0)

    def residual(self, x: np.ndarray) -> float:
        if self.n_constraints == 0:
            return 0.0
        return float(np.max(np.abs(self.A @ x - self.b)))


@dataclass
class SdpSolution:
    status: str  # optimal | infeasible | unknown
    x: np.ndarray | None
    raw_status: str = ""
    solver: str = ""
    info: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status == "optimal" and self.x is not None


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _diag_size(p: SdpProblem) -> int:
    return 2 * p.n_free + p.n_lp


def export_sdpa(p: SdpProblem, comment: str = "") -> str:
    """Sparse SDPA (``.dat-s``) text; identical problems give identical bytes."""
    diag = _diag_size(p)
    struct = list(p.psd_sizes) + ([-diag] if diag else [])
    lines = [f'"{comment}"' if comment else '"sdp"']
    lines.append(str(p.n_constraints))
    lines.append(str(len(struct)))
    lines.append(" ".join(str(s) for s in struct) if struct else "0")
    lines.append(" ".join(_fmt(v) for v in p.b) if p.n_constraints else "")
    diag_blk = len(p.psd_sizes) + 1
    rows = [(-p.c, 0)] + [(p.A.getrow(k).toarray().ravel(), k + 1) for k in range(p.n_constraints)]
    for vec, matno in rows:
        lines.extend(_entries(p, vec, matno, diag_blk))
    return "\n".join(lines) + "\n"


def _entries(p: SdpProblem, vec: np.ndarray, matno: int, diag_blk: int) -> list[str]:
    out = []
    nz = np.nonzero(vec)[0]
    by_block: dict[int, list[tuple[int, int, float]]] = {}
    offsets = p.block_offsets()
    for idx in nz:
        v = vec[idx]
        if idx < p.n_free:
            by_block.setdefault(diag_blk, []).append((idx + 1, idx + 1, v))
            by_block[diag_blk].append((p.n_free + idx + 1, p.n_free + idx + 1, -v))
        elif idx < p.n_free + p.n_lp:
            k = 2 * p.n_free + (idx - p.n_free) + 1
            by_block.setdefault(diag_blk, []).append((k, k, v))
        else:
            blk = max(b for b, o in enumerate(offsets) if o <= idx)
            s = p.psd_sizes[blk]
            local = idx - offsets[blk]
            i, j = local % s, local // s
            if i <= j:
                by_block.setdefault(blk + 1, []).append((i + 1, j + 1, v))
    for blk in sorted(by_block):
        for i, j, v in sorted(by_block[blk]):
            out.append(f"{matno} {blk} {i} {j} {_fmt(v)}")
    return out


# -- solution files ------------------------------------------------------------

def import_solution(text: str, p: SdpProblem) -> SdpSolution:
    """Read an SDPA result file (``yMat``) or a CSDP solution file (matrix 2)."""
    if "yMat" in text:
        return _import_sdpa_output(text, p)
    return _import_csdp(text, p)


def _from_blocks(p: SdpProblem, blocks: dict[int, np.ndarray]) -> np.ndarray:
    diag_blk = len(p.psd_sizes) + 1
    psd = []
    for k, s in enumerate(p.psd_sizes, 1):
        B = blocks.get(k, np.zeros((s, s)))
        if B.shape != (s, s):
            raise SdpFormatError(f"block {k} has shape {B.shape}, expected {(s, s)}")
        psd.append(B)
    diag = _diag_size(p)
    d = np.diag(blocks[diag_blk]) if diag_blk in blocks else np.zeros(diag)
    if len(d) != diag:
        raise SdpFormatError(f"diagonal block has size {len(d)}, expected {diag}")
    free = d[:p.n_free] - d[p.n_free:2 * p.n_free]
    lp = d[2 * p.n_free:]
    return p.join(free, lp, psd)


def _import_csdp(text: str, p: SdpProblem) -> SdpSolution:
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise SdpFormatError("empty solution file")
    sizes = {k: s for k, s in enumerate(p.psd_sizes, 1)}
    diag_blk = len(p.psd_sizes) + 1
    if _diag_size(p):
        sizes[diag_blk] = _diag_size(p)
    blocks = {k: np.zeros((s, s)) for k, s in sizes.items()}
    for parts in lines[1:]:
        if len(parts) != 5:
            raise SdpFormatError(f"bad solution line {' '.join(parts)!r}")
        try:
            matno, blk, i, j = (int(t) for t in parts[:4])
            val = float(parts[4])
        except ValueError:
            raise SdpFormatError(f"bad solution line {' '.join(parts)!r}") from None
        if matno != 2:
            continue
        if blk not in blocks or not (1 <= i <= sizes[blk] and 1 <= j <= sizes[blk]):
            raise SdpFormatError(f"entry ({blk}, {i}, {j}) outside the block structure")
        blocks[blk][i - 1, j - 1] = val
        blocks[blk][j - 1, i - 1] = val
    return SdpSolution("optimal", _from_blocks(p, blocks), "csdp", "file")


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


def _parse_braced(text: str, start: int) -> tuple[list, int]:
    """Parse nested ``{...}`` lists of numbers starting at ``text[start] == '{'``."""
    stack: list[list] = []
    i = start
    num = re.compile(_NUM)
    while i < len(text):
        ch = text[i]
        if ch == "{":
            stack.append([])
            i += 1
        elif ch == "}":
            done = stack.pop()
            if not stack:
                return done, i + 1
            stack[-1].append(done)
            i += 1
        elif ch in " ,\t\r\n":
            i += 1
        else:
            m = num.match(text, i)
            if not m or not stack:
                raise SdpFormatError(f"unexpected character {ch!r} in matrix listing")
            stack[-1].append(float(m.group()))
            i = m.end()
    raise SdpFormatError("unterminated matrix listing")


def _import_sdpa_output(text: str, p: SdpProblem) -> SdpSolution:
    m = re.search(r"phase\.value\s*=\s*(\w+)", text)
    raw = m.group(1) if m else ""
    status = "optimal" if raw in ("pdOPT", "pdFEAS", "dFEAS") else ("infeasible" if "INF" in raw or "UNBD" in raw else "unknown")
    at = text.index("yMat")
    brace = text.index("{", at)
    listing, _ = _parse_braced(text, brace)
    blocks: dict[int, np.ndarray] = {}
    for k, blk in enumerate(listing, 1):
        if blk and isinstance(blk[0], list):
            blocks[k] = np.array(blk, dtype=float)
        else:
            blocks[k] = np.diag(np.array(blk, dtype=float))
    expected = len(p.psd_sizes) + (1 if _diag_size(p) else 0)
    if len(blocks) != expected:
        raise SdpFormatError(f"solution has {len(blocks)} blocks, problem has {expected}")
    return SdpSolution(status, _from_blocks(p, blocks), raw, "sdpa-file")
