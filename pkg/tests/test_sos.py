import os
import warnings

import numpy as np
import pytest
from scipy import sparse

from hyperabc.barrier import check_ci
from hyperabc.pipeline import SosOracle, decompose
from hyperabc.polysys import SamplerConfig, parse_polynomial
from hyperabc.sos import (ENV_VAR, AffinePolynomial, BasisError, CertificateUnavailable, DegreeDeficitError, MonomialBasis,
                          SdpFormatError, SdpProblem, SdpSolution, SosProgram, build_sos_program,
                          coefficient_match, export_sdpa, import_solution, reconstruct_certificate, solve_sdp,
                          validate_gram)

from conftest import DATA, requires_solver


def single(poly_src, variables, exponents=None):
    p = parse_polynomial(poly_src, variables)
    expr = AffinePolynomial.from_polynomial(p, tuple(variables))
    prog = SosProgram()
    basis = MonomialBasis(tuple(variables), tuple(exponents)) if exponents is not None else None
    prog.add_sos(expr, "sos", basis=basis)
    return prog


def toy_problem():
    """min trace(X) s.t. X11 = 1, X PSD (2x2)."""
    A = sparse.csr_matrix(np.array([[1.0, 0.0, 0.0, 0.0]]))
    return SdpProblem(A, [1.0], [1.0, 0.0, 0.0, 1.0], 0, 0, (2,))


# -- Gram matching ------------------------------------------------------------

def test_square_has_the_expected_gram_matrix():
    x = parse_polynomial("(x + 1)^2", ["x"])
    expr = AffinePolynomial.from_polynomial(x, ("x",))
    rows, block = coefficient_match(expr, MonomialBasis(("x",), ((0,), (1,))), 0)
    Q = np.array([[1.0, 1.0], [1.0, 1.0]])
    vals = np.array([Q[0, 0], Q[0, 1], Q[1, 1]])
    for eq in rows:
        lhs = sum(c * vals[k] for k, c in eq.coeffs.items())
        assert lhs == pytest.approx(eq.rhs)
    assert np.allclose(block.matrix(vals), Q)


@requires_solver
def test_square_is_feasible_with_psd_gram():
    prog = single("(x + 1)^2", ["x"], [(0,), (1,)])
    sol = solve_sdp(prog.to_sdp())
    assert sol.feasible
    (Q,) = prog.gram_matrices(sol.x)
    assert np.allclose(Q, [[1, 1], [1, 1]], atol=1e-5)


@requires_solver
def test_motzkin_is_not_sos():
    prog = single("x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1", ["x", "y"], [(0, 0), (1, 1), (2, 1), (1, 2)])
    sol = solve_sdp(prog.to_sdp())
    assert not sol.feasible or not validate_gram(sol, prog, 1e-6).ok


@requires_solver
def test_negative_constant_is_not_sos():
    prog = single("-1", ["x"], [(0,)])
    sol = solve_sdp(prog.to_sdp())
    assert not sol.feasible


def test_basis_too_small():
    with pytest.raises(BasisError, match="extend the basis"):
        single("x^2", ["x"], [(0,)])


def test_degree_cap():
    p = AffinePolynomial.from_polynomial(parse_polynomial("x^4"), ("x",))
    with pytest.raises(DegreeDeficitError):
        SosProgram().add_sos(p, "e", max_degree=2)


# -- SDPA files ---------------------------------------------------------------

def test_sdpa_export_matches_golden_file():
    text = export_sdpa(toy_problem(), comment="toy")
    assert text == (DATA / "toy.dat-s").read_text()
    assert export_sdpa(toy_problem(), comment="toy") == text


@requires_solver
def test_toy_problem_optimum():
    sol = solve_sdp(toy_problem())
    assert sol.feasible
    _, _, (X,) = toy_problem().split(sol.x)
    assert np.trace(X) == pytest.approx(1.0, abs=1e-5)


def test_program_export_is_byte_stable(vehicle):
    d = decompose(vehicle)
    cis = [d.pairs[0].ci]
    one = export_sdpa(build_sos_program(cis, d.aug, d.prefix).to_sdp(), "v")
    two = export_sdpa(build_sos_program(cis, d.aug, d.prefix).to_sdp(), "v")
    assert one == two


def test_block_structure_line(room):
    d = decompose(room)
    prog = build_sos_program([d.pairs[0].ci], d.aug, d.prefix)
    problem = prog.to_sdp()
    assert len(problem.psd_sizes) == len(prog.blocks) == len(prog.summary()["gram_blocks"])
    lines = export_sdpa(problem).splitlines()
    n_blocks = int(lines[2])
    assert n_blocks == len(prog.blocks) + (1 if problem.n_free else 0)
    assert len(lines[3].split()) == n_blocks


def test_external_solver_round_trip():
    binary = os.environ.get(ENV_VAR, "")
    if binary in ("", "cvxpy", "sdpa") or binary.startswith("cvxpy:"):
        warnings.warn("no external SDPA/CSDP binary configured; file round trip skipped")
        pytest.skip("no external solver binary")
    problem = toy_problem()
    sol = solve_sdp(problem, binary)
    assert sol.feasible and problem.residual(sol.x) <= 1e-6


def test_import_csdp_solution():
    sol = import_solution("1.0\n1 1 1 1 1.0\n2 1 1 1 1.0\n2 1 1 2 0.0\n", toy_problem())
    assert np.allclose(sol.x, [1, 0, 0, 0])


def test_import_sdpa_solution():
    text = "phase.value = pdOPT\nxVec = \n{1}\nyMat = \n{\n{ {1.0, 0.0}, {0.0, 0.0} }\n}\n"
    sol = import_solution(text, toy_problem())
    assert sol.status == "optimal" and np.allclose(sol.x, [1, 0, 0, 0])


@pytest.mark.parametrize("text", ["", "1.0\n2 1 1\n", "1.0\n2 1 3 3 1.0\n",
                                  "phase.value = pdOPT\nyMat = \n{\n{ {1.0, 0.0}, {0.0, 0.0} }\n{1}\n}\n"])
def test_import_malformed(text):
    with pytest.raises(SdpFormatError):
        import_solution(text, toy_problem())


# -- validation ---------------------------------------------------------------

def test_validate_identity_gram():
    prog = single("x^2 + 1", ["x"], [(0,), (1,)])
    problem = prog.to_sdp()
    sol = SdpSolution("optimal", problem.join([], [], [np.eye(2)]))
    check = validate_gram(sol, prog, 0.0)
    assert check.ok and check.max_residual == 0.0


def test_validate_rejects_negative_eigenvalue():
    prog = single("1 - 0.001*x^2", ["x"], [(0,), (1,)])
    problem = prog.to_sdp()
    sol = SdpSolution("optimal", problem.join([], [], [np.diag([1.0, -1e-3])]))
    check = validate_gram(sol, prog, 1e-6)
    assert not check.ok and check.failing_blocks == ["sos"]
    assert check.min_eigenvalues[0] == pytest.approx(-1e-3)


def test_infeasible_solution_has_no_certificate(room):
    d = decompose(room)
    prog = build_sos_program([d.pairs[0].ci], d.aug, d.prefix)
    with pytest.raises(CertificateUnavailable, match="pINF") as err:
        reconstruct_certificate(SdpSolution("infeasible", None, "pINF"), prog)
    assert err.value.status == "infeasible"


# -- certificate programs -----------------------------------------------------

def test_room_program_has_no_strategies(room, vehicle):
    d = decompose(room)
    prog = build_sos_program([d.pairs[0].ci], d.aug, d.prefix)
    assert prog.strategy_templates == {} and not any(k.startswith("h[") for k in prog.free)
    dv = decompose(vehicle)
    pv = build_sos_program([dv.pairs[0].ci], dv.aug, dv.prefix)
    assert set(pv.strategy_templates) == {"w__2"}


@requires_solver
def test_empty_condition_list_is_feasible(room):
    d = decompose(room)
    prog = build_sos_program([], d.aug, d.prefix)
    sol = solve_sdp(prog.to_sdp())
    assert sol.feasible and validate_gram(sol, prog).ok


@requires_solver
def test_room_certificate_end_to_end(room):
    d = decompose(room)
    out = SosOracle(d)([0])
    assert out.feasible, out.attempts
    cand = out.candidate
    report = check_ci(cand, d.pairs[0].ci, d.aug, room.options.sampler, room.options.check_tol)
    assert report.passed
    # B(x) - B(f(x)) is nonnegative on the state set, independent of the multipliers
    rng = np.random.default_rng(0)
    for _ in range(100):
        z = {v: float(rng.uniform(20, 35)) for v in d.aug.state_vars}
        nxt = {v: fi.eval(z) for v, fi in zip(d.aug.state_vars, d.aug.f)}
        assert cand.barrier.eval(z) - cand.barrier.eval(nxt) >= -1e-6


@requires_solver
def test_vehicle_certificate_end_to_end(vehicle):
    d = decompose(vehicle)
    out = SosOracle(d)([0])
    assert out.feasible, out.attempts
    report = check_ci(out.candidate, d.pairs[0].ci, d.aug, SamplerConfig(seed=3), vehicle.options.check_tol)
    assert report.triple_passed
    assert set(out.candidate.strategies) == {"w__2"}
