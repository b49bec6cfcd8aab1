"""Verification reports and an independent replay of everything they claim."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from ..automata import Edge, hoa_export, hoa_import, implies, parse_guard
from ..barrier import CertificateCandidate, check_ci
from ..polysys import parse_polynomial
from .decompose import Decomposition, decompose, make_ci
from .oracle import OracleOutcome
from .problem import ProblemSpec, load_problem

FORMAT = "hyperabc-report/1"


@dataclass
class VerificationReport:
    data: dict

    @property
    def verdict(self) -> str:
        return self.data["verdict"]

    @property
    def satisfied(self) -> bool:
        return self.verdict == "SATISFIED"

    @property
    def causes(self) -> list[dict]:
        return self.data["causes"]

    @property
    def cause_kinds(self) -> list[str]:
        return [c["cause"] for c in self.causes]

    @property
    def certificates(self) -> list[dict]:
        return self.data["certificates"]

    @property
    def flags(self) -> list[str]:
        return self.data["flags"]

    def candidate(self, k: int = 0) -> CertificateCandidate | None:
        c = self.certificates[k]["candidate"]
        return CertificateCandidate.from_json(c) if c else None

    def to_json(self, timing: bool = True) -> dict:
        if timing:
            return self.data
        return {k: v for k, v in self.data.items() if k != "timing"}

    def dumps(self, timing: bool = True) -> str:
        return json.dumps(self.to_json(timing), indent=2, sort_keys=True)


class ReportBuilder:
    def __init__(self, spec: ProblemSpec, decomp: Decomposition, algorithm: str):
        self.spec = spec
        self.decomp = decomp
        self.algorithm = algorithm
        self.t0 = time.perf_counter()
        self.flags: list[str] = []
        self.causes: list[dict] = []
        self.certs: list[dict] = []
        self._cert_ids: dict[tuple[int, ...], int] = {}
        self.denied: dict[int, dict] = {}
        self.calls: list[OracleOutcome] = []
        self.visits: list[int] = []

    def flag(self, text: str) -> None:
        self.flags.append(text)

    def cause(self, kind: str, lasso: int | None = None, detail: str = "", **extra) -> None:
        entry = {"cause": kind, "lasso": lasso, "detail": detail}
        entry.update(extra)
        self.causes.append(entry)

    def visit(self, q: int) -> None:
        self.visits.append(q)

    def record_calls(self, outcomes) -> None:
        self.calls.extend(outcomes)

    def certificate(self, out: OracleOutcome, state: int | None = None, edge: Edge | None = None) -> int:
        key = tuple(out.pairs)
        if key in self._cert_ids:
            return self._cert_ids[key]
        k = len(self.certs)
        opt = self.spec.options
        self.certs.append({
            "id": k,
            "pairs": list(out.pairs),
            "at_state": state,
            "at_edge": [edge.src, edge.dst, str(edge.guard)] if edge is not None else None,
            "candidate": out.candidate.to_json() if out.candidate is not None else None,
            "strategy_mode": out.strategy_mode,
            "fixed_strategies": out.fixed_strategies,
            "program": {
                "degrees": opt.to_json()["degrees"],
                "epsilon": opt.epsilon,
                "enforce_input_feasibility": opt.enforce_input_feasibility,
            },
            "gram": next((a.get("gram") for a in reversed(out.attempts) if a.get("checks_passed")), None),
            "checks": {str(p): reports for p, reports in sorted(out.checks.items())},
            "solution": out.solution,
        })
        self._cert_ids[key] = k
        return k

    def deny(self, lasso: int, cert: int, pairs: list[int]) -> None:
        entry = self.denied.setdefault(lasso, {"certificate": cert, "pairs": []})
        if entry["certificate"] == cert:
            entry["pairs"] = sorted(set(entry["pairs"]) | set(pairs))

    def finish(self, verdict: str, t0: float | None = None) -> VerificationReport:
        d = self.decomp
        lassos = []
        for i in range(len(d.lassos)):
            entry = d.lasso_json(i)
            entry["denied_by"] = self.denied.get(i)
            lassos.append(entry)
        data: dict[str, Any] = {
            "format": FORMAT,
            "problem": self.spec.name,
            "verdict": verdict,
            "algorithm": self.algorithm,
            "formula": str(self.spec.formula),
            "prefix": list(self.spec.prefix),
            "flags": list(self.flags),
            "causes": list(self.causes),
            "automaton_hoa": hoa_export(d.automaton) if not d.automaton.is_empty else None,
            "lassos": lassos,
            "pairs": [p.to_json() for p in d.pairs],
            "certificates": self.certs,
            "oracle_calls": [o.summary() for o in self.calls],
            "visited_states": self.visits,
            "options": self.spec.options.to_json(),
            "spec": dict(self.spec.raw),
            "timing": {
                "total_seconds": time.perf_counter() - (t0 if t0 is not None else self.t0),
                "oracle_seconds": [o.seconds for o in self.calls],
            },
        }
        return VerificationReport(data)


# -- audit -------------------------------------------------------------------

@dataclass
class AuditResult:
    ok: bool
    findings: list[str] = field(default_factory=list)
    replayed_checks: int = 0
    replayed_programs: int = 0

    def to_json(self) -> dict:
        return {"ok": self.ok, "findings": self.findings, "replayed_checks": self.replayed_checks,
                "replayed_programs": self.replayed_programs}


def _spec_from_report(data: Mapping[str, Any]) -> ProblemSpec:
    raw = dict(data["spec"])
    opts = dict(raw.get("options", {}))
    opts.pop("automaton_override", None)
    raw["options"] = opts
    return load_problem(raw)


def audit_report(report: VerificationReport | Mapping[str, Any], replay_programs: bool = True,
                 gram_tol: float | None = None) -> AuditResult:
    """Re-derive lassos, re-run every embedded check, and (optionally) re-validate every Gram solution.

    Needs nothing but the report: the problem spec and the automaton are
    embedded in it.
    """
    from ..sos import SdpSolution, build_sos_program, reconstruct_certificate, validate_gram
    from ..sos.program import SosDegrees

    data = report.data if isinstance(report, VerificationReport) else dict(report)
    findings: list[str] = []
    res = AuditResult(True, findings)
    spec = _spec_from_report(data)
    aut = hoa_import(data["automaton_hoa"], atom_arity=spec.atom_arity) if data.get("automaton_hoa") else None
    if aut is None:
        if data["lassos"]:
            findings.append("report lists lassos but embeds no automaton")
        res.ok = not findings and data["verdict"] in ("SATISFIED", "INCONCLUSIVE")
        return res
    decomp = decompose(spec, aut, run_precheck=False)
    if [list(l.states) for l in decomp.lassos] != [l["states"] for l in data["lassos"]]:
        findings.append("lasso enumeration does not match the report")
    pair_text = {p["id"]: (p["s_A"], p["s_B"]) for p in data["pairs"]}
    opt = spec.options
    tol = opt.check_tol
    gtol = gram_tol if gram_tol is not None else opt.gram_tol

    cert_ok: dict[int, bool] = {}
    for cert in data["certificates"]:
        k = cert["id"]
        if cert["candidate"] is None:
            findings.append(f"certificate {k} has no polynomial (stub oracle)")
            cert_ok[k] = False
            continue
        cand = CertificateCandidate.from_json(cert["candidate"])
        ok = True
        cis = []
        for pid in cert["pairs"]:
            s_a, s_b = (parse_guard(t, aut.alphabet, spec.atom_arity) for t in pair_text[pid])
            ci = make_ci(spec, s_a, s_b)
            cis.append(ci)
            rep = check_ci(cand, ci, decomp.aug, opt.sampler, tol)
            res.replayed_checks += 1
            if not rep.passed:
                ok = False
                bad = [r.condition for r in rep.reports() if not r.passed]
                findings.append(f"certificate {k} fails {bad} on pair {pid}")
            recorded = cert["checks"].get(str(pid))
            if recorded is not None and [r["verdict"] for r in recorded] != [r.verdict for r in rep.reports()]:
                findings.append(f"certificate {k}: recorded check verdicts differ on pair {pid}")
        if replay_programs and cert.get("solution") is not None:
            fixed = cert.get("fixed_strategies")
            fixed = {w: parse_polynomial(h) for w, h in fixed.items()} if fixed else None
            deg = cert["program"]["degrees"]
            prog = build_sos_program(cis, decomp.aug, spec.prefix, SosDegrees(**deg), cert["program"]["epsilon"],
                                     enforce_input_feasibility=cert["program"]["enforce_input_feasibility"],
                                     fixed_strategies=fixed)
            problem = prog.to_sdp()
            sol = SdpSolution("optimal", np.asarray(cert["solution"], dtype=float))
            if len(sol.x) != problem.n_vars:
                ok = False
                findings.append(f"certificate {k}: solution length does not match the rebuilt program")
            else:
                gram = validate_gram(sol, prog, gtol, problem)
                res.replayed_programs += 1
                if not gram.ok:
                    ok = False
                    findings.append(f"certificate {k}: Gram validation fails for {gram.failing_blocks}")
                again = reconstruct_certificate(sol, prog)
                if not again.barrier.allclose(cand.barrier, atol=1e-8, rtol=1e-6):
                    ok = False
                    findings.append(f"certificate {k}: barrier does not match the solution vector")
        cert_ok[k] = ok

    assumed = [(t, parse_guard(t, aut.alphabet, spec.atom_arity)) for t in opt.assumed_unreachable_initial_guards]
    for entry, lasso in zip(data["lassos"], decomp.lassos):
        i = entry["id"]
        covered = False
        if entry.get("discharged_by_assumption"):
            first = lasso.edges[0].guard
            union = None
            for _, g in assumed:
                union = g if union is None else union.disj(g, aut.alphabet)
            if union is not None and implies(first, union, aut.alphabet):
                covered = True
            else:
                findings.append(f"lasso {i}: first guard is not inside the assumed guards")
        denied = entry.get("denied_by")
        if denied is not None:
            k = denied["certificate"]
            on_lasso = {pair_text[p] for p in entry["pairs"]}
            if not all(pair_text[p] in on_lasso for p in denied["pairs"]) or not denied["pairs"]:
                findings.append(f"lasso {i}: denying pairs are not transition pairs of the lasso")
            elif cert_ok.get(k):
                covered = True
        if data["verdict"] == "SATISFIED" and not covered:
            findings.append(f"lasso {i} is neither denied by a valid certificate nor discharged")
    res.ok = not findings
    return res
