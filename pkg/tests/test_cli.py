import json

import pytest

from hyperabc.pipeline import bundled_path
from hyperabc.polysys import parse_polynomial
from hyperabc.pipeline.cli import main

from conftest import requires_solver

VEHICLE = str(bundled_path("vehicle_opacity.json"))
ROOM = str(bundled_path("room_robustness.json"))


def call(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse(capsys):
    code, out, _ = call(capsys, "parse", "forall p1. exists p2. a[p1] U b[p2]")
    data = json.loads(out)
    assert code == 0
    assert data["fragment"] == "forall-exists" and data["forall_exists"] is True
    assert data["prefix"] == [["forall", "p1"], ["exists", "p2"]]


def test_parse_spec_file(capsys):
    code, out, _ = call(capsys, "parse", VEHICLE)
    assert code == 0 and json.loads(out)["fragment"] == "forall-exists"


def test_automaton_is_hoa(capsys, tmp_path):
    target = tmp_path / "room.hoa"
    code, _, _ = call(capsys, "automaton", ROOM, "-o", str(target))
    text = target.read_text()
    assert code == 0 and text.startswith("HOA: v1") and "--END--" in text


def test_lassos_of_hoa_file(capsys):
    code, out, _ = call(capsys, "lassos", str(bundled_path("branching.hoa")))
    data = json.loads(out)["lassos"]
    assert code == 0
    assert sorted(tuple(l["states"]) for l in data) == [(0, 1, 5, 5), (0, 2, 3, 5, 5), (0, 2, 4, 5, 5)]
    assert {len(l["pairs"]) for l in data} == {2, 3}


def test_decompose(capsys):
    code, out, _ = call(capsys, "decompose", VEHICLE)
    data = json.loads(out)
    assert code == 0
    assert [p["eligible"] for p in data["pairs"]].count(True) == 1
    assert all("set_A" in p and "set_B" in p for p in data["pairs"])
    assert data["automaton_hoa"].startswith("HOA: v1")


def test_synthesize_writes_sdpa(capsys, tmp_path):
    target = tmp_path / "room.dat-s"
    code, out, _ = call(capsys, "synthesize", ROOM, "--sdpa", str(target))
    assert code == 0
    lines = target.read_text().splitlines()
    assert lines[0].startswith('"') and int(lines[1]) == json.loads(out)["program"]["equalities"]


def test_synthesize_unknown_pair(capsys):
    code, _, err = call(capsys, "synthesize", ROOM, "--pair", "99", "--sdpa", "unused")
    assert code == 1 and "unknown pair" in err


@pytest.mark.parametrize("spec, candidate", [(VEHICLE, "vehicle_candidate.json"), (ROOM, "room_candidate.json")])
def test_check_reference_candidates(capsys, spec, candidate):
    code, out, err = call(capsys, "check", str(bundled_path(candidate)), spec, "--tol", "0.05")
    assert code == 0 and json.loads(out)["triple_passed"]
    assert "PASS initial" in err


def test_check_strict_vehicle_reports_input_feasibility(capsys):
    code, out, _ = call(capsys, "check", str(bundled_path("vehicle_candidate.json")), VEHICLE, "--tol", "0.05",
                        "--strict")
    data = json.loads(out)
    assert data["triple_passed"] and not data["all_passed"] and code == 2


@requires_solver
def test_run_and_audit(capsys, tmp_path):
    report = tmp_path / "room.json"
    code, _, err = call(capsys, "run", ROOM, "--no-timing", "-o", str(report))
    assert code == 0 and "SATISFIED" in err
    first = report.read_text()
    call(capsys, "run", ROOM, "--no-timing", "-o", str(report))
    assert report.read_text() == first
    code, out, _ = call(capsys, "audit", str(report))
    assert code == 0 and json.loads(out)["ok"]


def test_errors_exit_with_one(capsys, tmp_path):
    assert call(capsys, "parse", "forall p. a[q]")[0] == 1
    assert call(capsys, "decompose", str(tmp_path / "missing.json"))[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    code, _, err = call(capsys, "run", str(bad))
    assert code == 1 and "invalid" in err


@requires_solver
def test_run_vehicle_reports_a_strategy(capsys):
    code, out, _ = call(capsys, "run", VEHICLE, "--no-timing")
    data = json.loads(out)
    assert code == 0 and data["verdict"] == "SATISFIED"
    cand = data["certificates"][0]["candidate"]
    assert set(cand["strategies"]) == {"w__2"}
    b = parse_polynomial(cand["barrier"])
    assert b.degree() == 2 and set(b.variables) <= {"s__1", "v__1", "s__2", "v__2"}
