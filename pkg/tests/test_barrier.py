import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperabc.barrier import (ROUNDED_TOL, CertificateCandidate, ConditionalInvariance, check_ci, check_classic_bc,
                              check_decrease, check_initial, check_unsafe, simulate, violation_at)
from hyperabc.pipeline import bundled_path
from hyperabc.pipeline.cli import check_candidate
from hyperabc.polysys import (BasicSet, DynamicalSystem, Polynomial, SamplerConfig, SemialgebraicRegion,
                              parse_polynomial, self_compose)

SMALL = SamplerConfig(grid_per_dim=15, grid_cap=5000, n_random=500, seed=1)


def interval(var, lo, hi):
    return SemialgebraicRegion.of(BasicSet((parse_polynomial(f"{var} - {lo}"), parse_polynomial(f"{hi} - {var}")),
                                           (var,)))


def contraction():
    """x' = 0.5 x on [0, 2]."""
    return DynamicalSystem(("x",), (), (parse_polynomial("0.5*x"),),
                           BasicSet((parse_polynomial("x"), parse_polynomial("2 - x")), ("x",)))


def unit_ci():
    aug = self_compose(contraction(), 1)
    return aug, ConditionalInvariance(("forall",), interval("x__1", 0, 0.5), interval("x__1", 1.5, 2))


def const(c):
    return CertificateCandidate(Polynomial.constant(c), {}, 0.0)


# -- single conditions --------------------------------------------------------

def test_constant_barriers_on_initial():
    aug, ci = unit_ci()
    assert check_initial(const(-1.0), ci, aug, SMALL).passed
    r = check_initial(const(1.0), ci, aug, SMALL)
    assert r.verdict == "fail" and r.worst_violation == pytest.approx(1.0)


def test_negative_constant_fails_unsafe():
    aug, ci = unit_ci()
    r = check_unsafe(const(-1.0), ci, aug, SMALL)
    assert r.verdict == "fail" and r.worst_violation == pytest.approx(1.0)


def test_empty_region_is_inconclusive():
    aug, _ = unit_ci()
    empty = ConditionalInvariance(("forall",), interval("x__1", 5, 6), interval("x__1", 1.5, 2))
    r = check_initial(const(-1.0), empty, aug, SMALL)
    assert r.verdict == "inconclusive" and r.samples == 0 and r.worst_violation is None


def test_zero_barrier_decreases():
    aug, ci = unit_ci()
    r = check_decrease(const(0.0), ci, aug, SMALL)
    assert r.passed and r.worst_violation == 0.0


# -- classic barrier certificates ---------------------------------------------

def test_classic_bc_accepts_and_rejects():
    sys = contraction()
    init, unsafe = interval("x", 0, 0.5), interval("x", 1.5, 2)
    good = check_classic_bc(parse_polynomial("x - 1"), sys, init, unsafe, SMALL)
    assert good.triple_passed
    bad = check_classic_bc(parse_polynomial("-x"), sys, init, unsafe, SMALL)
    assert bad.initial.passed and not bad.unsafe.passed
    assert set(bad.unsafe.witness) == {"x"}


def test_decrease_needs_a_nonnegative_domain():
    # B(x/2) - B(x) = -x/2 is positive for x < 0
    init, unsafe = interval("x", -1, 0), interval("x", 2, 2)
    for lo, verdict in ((-1, "fail"), (0, "pass")):
        sys = DynamicalSystem(("x",), (), (parse_polynomial("0.5*x"),),
                              BasicSet((parse_polynomial(f"x - {lo}"), parse_polynomial("2 - x")), ("x",)))
        report = check_classic_bc(parse_polynomial("x - 1"), sys, init, unsafe, SMALL)
        assert report.decrease.verdict == verdict
        if verdict == "fail":
            assert report.decrease.witness["x"] < 0
            assert report.decrease.worst_violation == pytest.approx(0.5)


def test_single_copy_room_reduction(room):
    sys = room.system
    init, unsafe = interval("T", 20.5, 21.5), interval("T", 25, 35)
    b = parse_polynomial("(T - 22)^2 - 9")
    direct = check_classic_bc(b, sys, init, unsafe, SMALL, epsilon=0.0)
    aug = self_compose(sys, 1)
    ci = ConditionalInvariance(("forall",), interval("T__1", 20.5, 21.5), interval("T__1", 25, 35))
    via_aug = check_ci(CertificateCandidate(b.rename({"T": "T__1"})), ci, aug, SMALL)
    for r1, r2 in zip(direct.reports(), via_aug.reports()):
        assert r1.verdict == r2.verdict
        assert r1.worst_violation == pytest.approx(r2.worst_violation, abs=1e-12)


# -- reference certificates ---------------------------------------------------

@pytest.mark.parametrize("problem, candidate", [("vehicle", "vehicle_candidate.json"),
                                                ("room", "room_candidate.json")])
def test_reference_certificates_pass(problem, candidate, request):
    spec = request.getfixturevalue(problem)
    report = check_candidate(json.loads(bundled_path(candidate).read_text()), spec, ROUNDED_TOL)
    assert report.triple_passed, [str(r) for r in report.reports()]


def test_reference_room_certificate_fails_at_tight_tolerance(room):
    # the rounded coefficients leave a small positive slack somewhere
    report = check_candidate(json.loads(bundled_path("room_candidate.json").read_text()), room, 1e-8)
    worst = max(r.worst_violation for r in report.triple)
    assert 0 < worst <= ROUNDED_TOL


def test_witness_reproduces(vehicle):
    data = json.loads(bundled_path("vehicle_candidate.json").read_text())
    report = check_candidate(data, vehicle, 0.0)
    aug = vehicle.augmented()
    cand = CertificateCandidate.from_json(data)
    for r in report.reports():
        if r.witness is None:
            continue
        again = violation_at(r.condition, cand, aug, vehicle.prefix, r.witness)
        assert again == pytest.approx(r.worst_violation, abs=1e-12)


def test_scaling_keeps_verdicts():
    aug, ci = unit_ci()
    base = CertificateCandidate(parse_polynomial("x__1 - 1"), {}, 0.2)
    ref = check_ci(base, ci, aug, SMALL, tol=0.0)
    for alpha in (0.5, 2.0):
        scaled = check_ci(base.scaled(alpha), ci, aug, SMALL, tol=0.0)
        for r1, r2 in zip(ref.triple, scaled.triple):
            assert r1.verdict == r2.verdict
            assert r2.worst_violation == pytest.approx(alpha * r1.worst_violation, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.01, 1))
def test_overlapping_regions_cannot_pass_both(a, b, eps):
    aug = self_compose(contraction(), 1)
    ci = ConditionalInvariance(("forall",), interval("x__1", 0, 1), interval("x__1", 0.5, 1.5))
    cand = CertificateCandidate(Polynomial.constant(b) + Polynomial.var("x__1") * a, {}, eps)
    init = check_initial(cand, ci, aug, SMALL, tol=1e-9)
    unsafe = check_unsafe(cand, ci, aug, SMALL, tol=1e-9)
    assert not (init.passed and unsafe.passed)


# -- trajectories -------------------------------------------------------------

@pytest.mark.parametrize("problem, candidate", [("vehicle", "vehicle_candidate.json"),
                                                ("room", "room_candidate.json")])
def test_barrier_nonincreasing_along_runs(problem, candidate, request):
    spec = request.getfixturevalue(problem)
    aug = spec.augmented()
    cand = CertificateCandidate.from_json(json.loads(bundled_path(candidate).read_text()))
    rng = np.random.default_rng(4)
    box = aug.state_box()
    steps_seen = 0
    for _ in range(20):
        x0 = {v: float(rng.uniform(*box[v])) for v in aug.state_vars}
        traj = simulate(aug, cand, spec.prefix, x0, 100, rng)
        diffs = np.diff(traj.barrier)
        steps_seen += len(diffs)
        assert np.all(diffs <= ROUNDED_TOL)
    assert steps_seen > 0


def test_candidate_json_round_trip():
    c = CertificateCandidate(parse_polynomial("x^2 - 1"), {"w": parse_polynomial("0.5*x")}, 0.01)
    back = CertificateCandidate.from_json(json.loads(json.dumps(c.to_json())))
    assert back == c
