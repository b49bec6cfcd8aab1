"""Turning SDP solutions back into certificates, and checking the Gram blocks."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..barrier import CertificateCandidate, ConditionalInvariance
from ..polysys import AugmentedSystem, Polynomial
from ..polysys.polynomial import _sorted_poly
from .program import SosDegrees, SosProgram, build_sos_program, scale_strategy, unscale
from .sdp import SdpProblem, SdpSolution
from .solvers import solve_sdp


class CertificateUnavailable(RuntimeError):
    """The solver did not return a usable solution (not evidence of a violation)."""

    def __init__(self, message: str, status: str = "unknown"):
        super().__init__(message)
        self.status = status


def _template_value(variables, monos, first, values) -> Polynomial:
    terms = {m: values[first + k] for k, m in enumerate(monos)}
    return _sorted_poly(variables, terms)


def reconstruct_certificate(sol: SdpSolution, prog: SosProgram, chop: float = 0.0) -> CertificateCandidate:
    """Read ``B`` and the strategies off a feasible solution (in the original coordinates)."""
    if not sol.feasible:
        raise CertificateUnavailable(f"solver status {sol.status} ({sol.raw_status})", sol.status)
    vals = prog.values_from(sol.x)
    if chop:
        vals = np.where(np.abs(vals) < chop, 0.0, vals)
    xs, monos, first = prog.barrier_template
    barrier = unscale(_template_value(xs, monos, first, vals), prog)
    strategies = dict(prog.fixed_strategies)
    for w, (args, w_monos, w_first) in prog.strategy_templates.items():
        strategies[w] = scale_strategy(_template_value(args, w_monos, w_first, vals), w, prog)
    return CertificateCandidate(barrier, strategies, prog.epsilon)


@dataclass
class GramCheck:
    ok: bool
    min_eigenvalues: list[float]
    max_residual: float
    failing_blocks: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def validate_gram(sol: SdpSolution, prog: SosProgram | None, tol: float = 1e-6,
                  problem: SdpProblem | None = None) -> GramCheck:
    """Every Gram block PSD up to ``tol`` and every equality satisfied up to ``tol``."""
    if sol.x is None:
        return GramCheck(False, [], float("inf"), ["<no solution>"])
    if problem is None:
        problem = prog.to_sdp()
    _free, _lp, blocks = problem.split(sol.x)
    labels = [b.label for b in prog.blocks] if prog is not None else [f"block{k}" for k in range(len(blocks))]
    eigs, failing = [], []
    for label, M in zip(labels, blocks):
        M = 0.5 * (M + M.T)
        lo = float(np.linalg.eigvalsh(M)[0]) if M.size else 0.0
        eigs.append(lo)
        if lo < -tol:
            failing.append(label)
    res = problem.residual(sol.x)
    if res > tol:
        failing.append("<equalities>")
    return GramCheck(not failing, eigs, res, failing)


@dataclass
class SynthesisResult:
    status: str  # found | infeasible | unavailable | invalid
    candidate: CertificateCandidate | None
    program: SosProgram | None
    solution: SdpSolution | None
    gram: GramCheck | None
    seconds: float
    message: str = ""

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "candidate": self.candidate.to_json() if self.candidate else None,
            "program": self.program.summary() if self.program else None,
            "solver": self.solution.solver if self.solution else None,
            "solver_status": self.solution.raw_status if self.solution else None,
            "gram_min_eigenvalues": self.gram.min_eigenvalues if self.gram else None,
            "equality_residual": self.gram.max_residual if self.gram else None,
            "seconds": self.seconds,
            "message": self.message,
        }


def synthesize(cis: Sequence[ConditionalInvariance], aug: AugmentedSystem, prefix: Sequence[str],
               degrees: SosDegrees = SosDegrees(), epsilon: float = 0.01, solver: str | None = None,
               gram_tol: float = 1e-6, **kwargs) -> SynthesisResult:
    """Build, solve and read back one program; never raises for solver trouble."""
    from .solvers import SolverUnavailable

    t0 = time.perf_counter()
    prog = build_sos_program(cis, aug, prefix, degrees, epsilon, **kwargs)
    problem = prog.to_sdp()
    try:
        sol = solve_sdp(problem, solver)
    except SolverUnavailable as exc:
        return SynthesisResult("unavailable", None, prog, None, None, time.perf_counter() - t0, str(exc))
    if not sol.feasible:
        return SynthesisResult("infeasible", None, prog, sol, None, time.perf_counter() - t0,
                               f"solver status {sol.raw_status or sol.status}")
    gram = validate_gram(sol, prog, gram_tol, problem)
    cand = reconstruct_certificate(sol, prog)
    status = "found" if gram.ok else "invalid"
    msg = "" if gram.ok else f"Gram validation failed for {gram.failing_blocks}"
    return SynthesisResult(status, cand, prog, sol, gram, time.perf_counter() - t0, msg)
