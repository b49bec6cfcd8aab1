"""SDP solver backends.

``cvxpy`` uses cvxpy with Clarabel when installed (or ``cvxpy:NAME``),
``sdpa`` uses the sdpa-python bindings, and any other value is taken as
the path of an SDPA- or CSDP-compatible executable called as
``solver input.dat-s output``. The environment variable
``HYPERABC_SDP_SOLVER`` overrides the automatic choice.
"""

from __future__ import annotations

import contextlib
import importlib.util
import os
import shutil
import subprocess
import sys
import tempfile
import warnings

import numpy as np

from .sdp import SdpFormatError, SdpProblem, SdpSolution, export_sdpa, import_solution

ENV_VAR = "HYPERABC_SDP_SOLVER"


class SolverUnavailable(RuntimeError):
    """No usable solver; synthesis cannot run (this is never a verdict)."""


def available_backends() -> list[str]:
    out = []
    if importlib.util.find_spec("cvxpy") is not None:
        out.append("cvxpy")
    if importlib.util.find_spec("sdpap") is not None:
        out.append("sdpa")
    return out


def resolve_solver(solver: str | None = None) -> str:
    choice = solver or os.environ.get(ENV_VAR) or ""
    if choice:
        return choice
    backends = available_backends()
    if not backends:
        raise SolverUnavailable("no SDP solver found; install sdpa-python or cvxpy, or set " + ENV_VAR)
    return backends[0]


def solve_sdp(problem: SdpProblem, solver: str | None = None) -> SdpSolution:
    name = resolve_solver(solver)
    if name in ("sdpa", "sdpap", "sdpa-python"):
        return _solve_sdpap(problem)
    if name == "cvxpy" or name.startswith("cvxpy:"):
        return _solve_cvxpy(problem, name.partition(":")[2] or None)
    return _solve_external(problem, name)


@contextlib.contextmanager
def _quiet_stdout():
    """Silence chatter written by native code directly to file descriptor 1."""
    sys.stdout.flush()
    try:
        saved = os.dup(1)
    except OSError:
        yield
        return
    with open(os.devnull, "w") as null:
        os.dup2(null.fileno(), 1)
        try:
            yield
        finally:
            sys.stdout.flush()
            os.dup2(saved, 1)
            os.close(saved)


_SDPA_OK = {"pdOPT", "pdFEAS"}


def _solve_sdpap(p: SdpProblem) -> SdpSolution:
    try:
        import sdpap
        from sdpap import SymCone
    except ImportError as exc:
        raise SolverUnavailable(f"sdpa-python is not installed ({exc})") from None
    if p.n_constraints == 0:
        return SdpSolution("optimal", _trivial_point(p), "trivial", "sdpa")
    K = SymCone(f=p.n_free, l=p.n_lp, s=p.psd_sizes)
    J = SymCone(f=p.n_constraints)
    with warnings.catch_warnings(), _quiet_stdout():
        warnings.simplefilter("ignore")
        x, _y, info, _t, _sinfo = sdpap.solve(p.A.tocsc(), p.b, p.c, K, J, {"print": "no"})
    raw = str(info.get("phasevalue", ""))
    x = np.asarray(x.toarray() if hasattr(x, "toarray") else x, dtype=float).ravel()
    if raw in _SDPA_OK:
        status = "optimal"
    elif "INF" in raw or "UNBD" in raw:
        status = "infeasible"
    else:
        status = "unknown"
    return SdpSolution(status, x, raw, "sdpa", {k: _plain(v) for k, v in info.items()})


def _plain(v):
    return v.item() if isinstance(v, np.generic) else v


def _trivial_point(p: SdpProblem) -> np.ndarray:
    return p.join(np.zeros(p.n_free), np.zeros(p.n_lp), [np.zeros((s, s)) for s in p.psd_sizes])


def _solve_cvxpy(p: SdpProblem, backend: str | None) -> SdpSolution:
    try:
        import cvxpy as cp
    except ImportError as exc:
        raise SolverUnavailable(f"cvxpy is not installed ({exc})") from None
    free = cp.Variable(p.n_free) if p.n_free else None
    lp = cp.Variable(p.n_lp, nonneg=True) if p.n_lp else None
    mats = [cp.Variable((s, s), PSD=True) for s in p.psd_sizes]
    parts = ([free] if free is not None else []) + ([lp] if lp is not None else [])
    parts += [cp.vec(M, order="F") for M in mats]
    if not parts:
        return SdpSolution("optimal", np.zeros(0), "trivial", "cvxpy")
    x = cp.hstack(parts)
    cons = [p.A @ x == p.b] if p.n_constraints else []
    prob = cp.Problem(cp.Minimize(p.c @ x), cons)
    if backend is None and "CLARABEL" in cp.installed_solvers():
        backend = "CLARABEL"
    label = f"cvxpy:{backend}" if backend else "cvxpy"
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            prob.solve(solver=backend)
    except cp.error.SolverError as exc:
        return SdpSolution("unknown", None, str(exc), label)
    raw = str(prob.status)
    if raw in ("optimal", "optimal_inaccurate"):
        return SdpSolution("optimal", np.asarray(x.value, dtype=float), raw, label)
    status = "infeasible" if "infeasible" in raw or "unbounded" in raw else "unknown"
    return SdpSolution(status, None, raw, label)


def _solve_external(p: SdpProblem, binary: str) -> SdpSolution:
    path = shutil.which(binary) or (binary if os.path.exists(binary) else None)
    if path is None:
        raise SolverUnavailable(f"SDP solver {binary!r} not found")
    with tempfile.TemporaryDirectory() as tmp:
        src = os.path.join(tmp, "problem.dat-s")
        out = os.path.join(tmp, "problem.out")
        with open(src, "w") as fh:
            fh.write(export_sdpa(p))
        try:
            proc = subprocess.run([path, src, out], capture_output=True, text=True, timeout=3600)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise SolverUnavailable(f"running {binary!r} failed: {exc}") from None
        if not os.path.exists(out):
            raise SolverUnavailable(f"{binary!r} produced no output (exit code {proc.returncode})")
        with open(out) as fh:
            text = fh.read()
    try:
        sol = import_solution(text, p)
    except SdpFormatError as exc:
        raise SolverUnavailable(f"unparseable output from {binary!r}: {exc}") from None
    # CSDP signals infeasibility through its exit code; its solution file has no status line
    if sol.raw_status == "csdp":
        sol.status = {0: "optimal", 1: "infeasible", 2: "infeasible"}.get(proc.returncode, "unknown")
    sol.solver = binary
    return sol
