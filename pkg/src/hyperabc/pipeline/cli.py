"""Command-line interface: ``hyperabc <subcommand> ...``.

Exit status 0 means success (SATISFIED, or the requested artifact was
produced), 2 means INCONCLUSIVE or failed checks, 1 means an error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from ..automata import hoa_export, hoa_import, pair_set, parse_guard
from ..barrier import CertificateCandidate, check_ci
from ..formula import classify, parse_hyperltl, to_text
from ..sos import export_sdpa, synthesize
from ..sos.program import build_sos_program
from .decompose import decompose, lasso_list, make_ci, negated_automaton
from .problem import ProblemSpec, load_problem
from .report import VerificationReport, audit_report
from .verify import run, verify_forall_exists, verify_general, verify_rabin

log = logging.getLogger("hyperabc")

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


def _emit(obj, out: str | None = None) -> None:
    text = obj if isinstance(obj, str) else json.dumps(obj, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _spec(args) -> ProblemSpec:
    spec = load_problem(args.spec)
    changes = {}
    if getattr(args, "solver", None):
        changes["sdp_solver"] = args.solver
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "algorithm", None):
        changes["algorithm"] = args.algorithm
    if changes:
        spec = dataclasses.replace(spec, options=dataclasses.replace(spec.options, **changes))
    return spec


def cmd_parse(args) -> int:
    src = args.formula
    if src.endswith(".json") and Path(src).exists():
        f = load_problem(src).formula
    else:
        f = parse_hyperltl(src)
    fc = classify(f)
    _emit({
        "formula": str(f),
        "prefix": [[q.kind, q.trace] for q in f.prefix],
        "body": to_text(f.body),
        "fragment": fc.kind,
        "forall_exists": fc.is_forall_exists,
    })
    return EXIT_OK


def cmd_automaton(args) -> int:
    spec = _spec(args)
    aut = negated_automaton(spec)
    if aut.is_empty:
        log.warning("the negated body is unsatisfiable on the state space; the automaton is empty")
        _emit("HOA: v1\nStates: 0\nAP: 0\nacc-name: Buchi\nAcceptance: 1 Inf(0)\n--BODY--\n--END--\n", args.output)
        return EXIT_OK
    _emit(hoa_export(aut, name=f"not psi: {spec.name}"), args.output)
    return EXIT_OK


def cmd_lassos(args) -> int:
    path = Path(args.source)
    if path.suffix == ".hoa":
        aut = hoa_import(path.read_text())
        lassos = lasso_list(aut)
        out = []
        for i, lasso in enumerate(lassos):
            out.append({
                "id": i,
                "states": list(lasso.states),
                "label": lasso.label(aut),
                "rabin_pair": lasso.pair_index,
                "pairs": [[str(tp.s_a), str(tp.s_b)] for tp in pair_set(lasso, i)],
            })
        _emit({"lassos": out})
    else:
        d = decompose(load_problem(path))
        _emit(d.to_json())
    return EXIT_OK


def cmd_decompose(args) -> int:
    spec = _spec(args)
    d = decompose(spec)
    data = d.to_json()
    for entry, info in zip(data["pairs"], d.pairs):
        entry["set_A"] = [str(c) for c in info.ci.set_a.clauses]
        entry["set_B"] = [str(c) for c in info.ci.set_b.clauses]
        entry["prefix"] = list(info.ci.prefix)
    data["automaton_hoa"] = hoa_export(d.automaton) if not d.automaton.is_empty else None
    _emit(data, args.output)
    return EXIT_OK


def cmd_synthesize(args) -> int:
    spec = _spec(args)
    d = decompose(spec)
    ids = args.pair or [p.id for p in d.pairs if p.eligible][:1]
    if not ids:
        print("no eligible transition pair to synthesize for", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    unknown = [k for k in ids if not 0 <= k < len(d.pairs)]
    if unknown:
        raise ValueError(f"unknown pair id(s) {unknown}; see `hyperabc decompose`")
    cis = [d.pairs[k].ci for k in ids]
    opt = spec.options
    if args.sdpa:
        prog = build_sos_program(cis, d.aug, spec.prefix, opt.degrees, opt.epsilon,
                                 enforce_input_feasibility=opt.enforce_input_feasibility)
        Path(args.sdpa).write_text(export_sdpa(prog.to_sdp(), comment=f"{spec.name} pairs {ids}"))
        _emit({"sdpa": args.sdpa, "program": prog.summary()})
        return EXIT_OK
    res = synthesize(cis, d.aug, spec.prefix, opt.degrees, opt.epsilon, opt.sdp_solver, opt.gram_tol,
                     enforce_input_feasibility=opt.enforce_input_feasibility)
    out = {"pairs": ids, "synthesis": res.to_json()}
    if res.candidate is not None:
        out["checks"] = {str(k): check_ci(res.candidate, d.pairs[k].ci, d.aug, opt.sampler, opt.check_tol).to_json()
                         for k in ids}
    _emit(out, args.output)
    return EXIT_OK if res.status == "found" else EXIT_INCONCLUSIVE


def check_candidate(candidate: dict, spec: ProblemSpec, tol: float | None = None):
    """CIReport of a candidate JSON (``s_A``/``s_B`` guard strings plus the certificate) against a spec."""
    aug = spec.augmented()
    aut_alphabet = negated_automaton(spec, aug).alphabet
    s_a = parse_guard(candidate["s_A"], aut_alphabet, spec.atom_arity)
    s_b = parse_guard(candidate["s_B"], aut_alphabet, spec.atom_arity)
    cand = CertificateCandidate.from_json(candidate)
    tol = tol if tol is not None else float(candidate.get("tol", spec.options.check_tol))
    return check_ci(cand, make_ci(spec, s_a, s_b), aug, spec.options.sampler, tol)


def cmd_check(args) -> int:
    spec = _spec(args)
    candidate = json.loads(Path(args.candidate).read_text())
    report = check_candidate(candidate, spec, args.tol)
    for r in report.reports():
        print(("PASS " if r.passed else "FAIL ") + str(r), file=sys.stderr)
    _emit({"triple_passed": report.triple_passed, "all_passed": report.passed, "reports": report.to_json()},
          args.output)
    ok = report.passed if args.strict else report.triple_passed
    return EXIT_OK if ok else EXIT_INCONCLUSIVE


_ALGOS = {"general": verify_general, "forall_exists": verify_forall_exists, "rabin": verify_rabin}


def cmd_run(args) -> int:
    spec = _spec(args)
    algo = spec.options.algorithm
    report = run(spec) if algo == "auto" else _ALGOS[algo](spec)
    _emit(report.dumps(timing=not args.no_timing), args.output)
    print(f"{spec.name}: {report.verdict} ({report.data['algorithm']})", file=sys.stderr)
    for c in report.causes:
        print(f"  cause {c['cause']}: {c['detail']}", file=sys.stderr)
    return EXIT_OK if report.satisfied else EXIT_INCONCLUSIVE


def cmd_audit(args) -> int:
    data = json.loads(Path(args.report).read_text())
    res = audit_report(VerificationReport(data), replay_programs=not args.skip_programs)
    _emit(res.to_json())
    return EXIT_OK if res.ok else EXIT_INCONCLUSIVE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyperabc", description="HyperLTL verification with augmented barrier certificates")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a formula (or a spec's formula) and classify its prefix")
    p.add_argument("formula")
    p.set_defaults(func=cmd_parse)

    def with_spec(p):
        p.add_argument("spec")
        p.add_argument("--solver")
        p.add_argument("--seed", type=int)
        p.add_argument("-o", "--output")

    p = sub.add_parser("automaton", help="HOA automaton for the negated body")
    with_spec(p)
    p.set_defaults(func=cmd_automaton)

    p = sub.add_parser("lassos", help="lassos and transition-pair sets of a spec or an HOA file")
    p.add_argument("source")
    p.set_defaults(func=cmd_lassos)

    p = sub.add_parser("decompose", help="conditional invariances with regions and pre-check results")
    with_spec(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("synthesize", help="SOS program for some pairs: write SDPA or solve")
    with_spec(p)
    p.add_argument("--pair", type=int, action="append", help="pair id (repeatable); default first eligible")
    p.add_argument("--sdpa", help="write the SDP in SDPA sparse format instead of solving")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("check", help="sampled checks of a candidate certificate")
    p.add_argument("candidate")
    with_spec(p)
    p.add_argument("--tol", type=float)
    p.add_argument("--strict", action="store_true", help="also require input feasibility of the strategies")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="full verification, prints a report")
    with_spec(p)
    p.add_argument("--algorithm", choices=["auto", "general", "forall_exists", "rabin"])
    p.add_argument("--no-timing", action="store_true", help="omit timing fields (byte-stable output)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("audit", help="replay every check recorded in a report")
    p.add_argument("report")
    p.add_argument("--skip-programs", action="store_true", help="skip rebuilding SOS programs")
    p.set_defaults(func=cmd_audit)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - every failure becomes exit status 1
        if args.verbose:
            log.exception("failed")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
