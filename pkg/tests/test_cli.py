import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from teamlab import __version__
from teamlab.cli import main
from teamlab.experiments import game_to_dict
from teamlab.games import CostTensor
from teamlab.info_struct import (
    CorrelatedGarbling,
    TeamSplit,
    apply_correlated_garbling,
    dump_json,
    from_dict,
    no_information,
    perfect_information,
    sample_info_structure,
)
from teamlab.ordering import enumerate_pure_garblings
from teamlab.prob_core import tv_distance

TWO = TeamSplit((2,), (2,), (2,), (2,))
BIN = TeamSplit((1,), (2,), (1,), (2,))


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        p = tmp_path / name
        if isinstance(doc, dict):
            p.write_text(json.dumps(doc))
        else:
            dump_json(doc, p)
        return str(p)

    return write


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_constant(files, capsys):
    info = files("mu.json", sample_info_structure(1, TWO, 2))
    game = files("g.json", game_to_dict(CostTensor(np.full((2, 2, 2), 0.75))))
    code, out, _ = _run(capsys, "solve", "--info", info, "--game", game)
    doc = json.loads(out)
    assert code == 0
    assert doc["value"] == pytest.approx(0.75, abs=1e-12)
    assert doc["version"] == __version__ and "tolerances" in doc and "seed" in doc


def test_solve_pennies(files, capsys):
    info = files("mu.json", no_information([0.5, 0.5], BIN))
    cost = np.array([[[1.0, -1.0], [-1.0, 1.0]]] * 2)
    game = files("g.json", game_to_dict(CostTensor(cost)))
    code, out, _ = _run(capsys, "solve", "--info", info, "--game", game, "--seed", "3")
    doc = json.loads(out)
    assert code == 0 and abs(doc["value"]) <= 1e-9 and doc["seed"] == 3
    assert sum(p["weight"] for p in doc["team1"]) == pytest.approx(1.0)


def test_solve_rejects_mass(files, capsys):
    doc = {"state_size": 2, "prior": [0.49, 0.49],
           "teams": [{"measurement_sizes": [1], "action_sizes": [2]},
                     {"measurement_sizes": [1], "action_sizes": [2]}],
           "joint": [0.49, 0.49]}
    info = files("bad.json", doc)
    game = files("g.json", {"cost": [0.0] * 8})
    code, out, err = _run(capsys, "solve", "--info", info, "--game", game)
    assert code == 2 and out == ""
    assert "mass error" in err


def test_malformed_json_line(files, capsys, tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{\n  "state_size": 2,\n  "prior": [0.5, 0.5],,\n}\n')
    game = files("g.json", {"cost": [0.0]})
    code, out, err = _run(capsys, "solve", "--info", str(p), "--game", game)
    assert code == 2 and out == ""
    assert "broken.json:3:" in err


def test_missing_file(capsys):
    code, out, err = _run(capsys, "garble-check", "--info", "/nonexistent.json", "--info2", "/nonexistent.json")
    assert code == 2 and out == "" and "error" in err


def test_missing_flag(capsys):
    code, _, err = _run(capsys, "solve")
    assert code == 2 and "--info" in err


def test_team_solve(files, capsys):
    split = TeamSplit((2,), (2,))
    info = files("mu.json", perfect_information([0.5, 0.5], split))
    game = files("g.json", {"cost": (1.0 - np.eye(2)).ravel().tolist()})
    code, out, _ = _run(capsys, "team-solve", "--info", info, "--game", game)
    doc = json.loads(out)
    assert code == 0 and doc["value"] == 0.0 and doc["policy"] == [[0, 1]]


def test_garble_check_self(files, capsys):
    mu = sample_info_structure(4, TWO, 2)
    p = files("mu.json", mu)
    code, out, _ = _run(capsys, "garble-check", "--info", p, "--info2", p)
    doc = json.loads(out)
    assert code == 0 and doc["comparable"]
    vs = enumerate_pure_garblings((2, 2))
    top = max(doc["witness_weights"], key=doc["witness_weights"].get)
    assert [t.tolist() for t in vs.tables(int(top))] == [[0, 1], [0, 1]]


def test_lecam_exit_three(files, capsys):
    split = TeamSplit((2,), (2,))
    a = files("a.json", no_information([0.5, 0.5], split))
    b = files("b.json", perfect_information([0.5, 0.5], split))
    code, out, _ = _run(capsys, "lecam", "--info", a, "--info2", b)
    doc = json.loads(out)
    assert code == 3
    assert doc["delta"] == pytest.approx(1.0, abs=1e-8)
    assert doc["delta_reverse"] <= 1e-9
    assert len(doc["certificate"]["cost"]) == 4
    code, _, _ = _run(capsys, "lecam", "--info", b, "--info2", a)
    assert code == 0


def test_compare_tat_constructed(files, capsys):
    mu = sample_info_structure(8, TWO, 2)
    g = CorrelatedGarbling((((0, 0),), ((0, 1),)), [0.5, 0.5], (2,))
    nu = apply_correlated_garbling(mu, g, 1)
    code, out, _ = _run(capsys, "compare-tat", "--info", files("mu.json", mu), "--info2", files("nu.json", nu))
    doc = json.loads(out)
    assert code == 0 and doc["comparable"]
    vs = enumerate_pure_garblings((2,))
    w = {int(k): v for k, v in doc["witness_weights"].items()}
    k1 = apply_correlated_garbling(mu, vs.garbling(w), 1)
    w2 = {int(k): v for k, v in doc["witness_weights_2"].items()}
    k2 = apply_correlated_garbling(nu, vs.garbling(w2), 2)
    assert tv_distance(k1.joint, k2.joint) <= 1e-9


def test_compare_tat_separated(files, capsys):
    mu = from_dict({"state_size": 2, "prior": [0.5, 0.5],
                    "teams": [{"measurement_sizes": [2], "action_sizes": [2]},
                              {"measurement_sizes": [2], "action_sizes": [2]}],
                    "joint": [0.5, 0, 0, 0, 0, 0.5, 0, 0]})
    nu = perfect_information([0.5, 0.5], TWO)
    code, out, _ = _run(capsys, "compare-tat", "--info", files("mu.json", mu), "--info2", files("nu.json", nu))
    assert code == 3 and json.loads(out)["status"] == "separated"


def _sweep(files, capsys, scale, tmp_path, name):
    mu = sample_info_structure(6, TWO, 2)
    cost = np.random.default_rng(6).uniform(-1, 1, size=(2, 2, 2)) * scale
    out = tmp_path / name
    code, _, _ = _run(capsys, "continuity", "--info", files("mu.json", mu),
                      "--game", files(f"g{scale}.json", game_to_dict(CostTensor(cost))),
                      "--steps", "5", "--seed", "9", "--csv", str(out))
    assert code == 0
    return out.read_text()


def test_continuity_csv(files, capsys, tmp_path):
    text = _sweep(files, capsys, 1.0, tmp_path, "a.csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert text.splitlines()[0] == "t,tv,value,bound"
    assert len(rows) == 6
    assert float(rows[0]["tv"]) == 0.0 and float(rows[0]["bound"]) == 0.0
    v0 = float(rows[0]["value"])
    for r in rows:
        assert abs(float(r["value"]) - v0) <= float(r["bound"]) + 1e-8


def test_continuity_scale_equivariance(files, capsys, tmp_path):
    a = list(csv.DictReader(io.StringIO(_sweep(files, capsys, 1.0, tmp_path, "a.csv"))))
    b = list(csv.DictReader(io.StringIO(_sweep(files, capsys, 2.0, tmp_path, "b.csv"))))
    va0, vb0 = float(a[0]["value"]), float(b[0]["value"])
    for ra, rb in zip(a, b):
        assert float(rb["bound"]) == pytest.approx(2 * float(ra["bound"]), abs=1e-12)
        assert float(rb["value"]) - vb0 == pytest.approx(2 * (float(ra["value"]) - va0), abs=1e-9)


def test_continuity_steps_validated(files, capsys):
    mu = files("mu.json", sample_info_structure(6, TWO, 2))
    game = files("g.json", {"cost": [0.0] * 8})
    code, _, _ = _run(capsys, "continuity", "--info", mu, "--game", game, "--steps", "1")
    assert code == 2


def test_determinism(files, capsys, tmp_path):
    mu = files("mu.json", sample_info_structure(12, TWO, 3))
    game = files("g.json", game_to_dict(CostTensor(np.random.default_rng(2).uniform(-1, 1, (3, 2, 2)))))
    outs = []
    for k in range(2):
        o = tmp_path / f"o{k}.json"
        c = tmp_path / f"c{k}.csv"
        assert main(["solve", "--info", mu, "--game", game, "--seed", "5", "--out", str(o)]) == 0
        assert main(["continuity", "--info", mu, "--game", game, "--seed", "5", "--csv", str(c)]) == 0
        outs.append((o.read_bytes(), c.read_bytes()))
    assert outs[0] == outs[1]


def test_example1_command(capsys):
    code, out, _ = _run(capsys, "example1", "--grid", "11")
    doc = json.loads(out)
    assert code == 0 and doc["checks_passed"] and doc["m"] == 11


def test_help_lists_flags():
    out = subprocess.run([sys.executable, "-m", "teamlab", "solve", "--help"], capture_output=True, text=True).stdout
    for flag in ("--info", "--info2", "--game", "--seed", "--steps", "--grid", "--cap", "--out", "--csv"):
        assert flag in out
    top = subprocess.run([sys.executable, "-m", "teamlab", "--help"], capture_output=True, text=True).stdout
    for cmd in ("solve", "team-solve", "garble-check", "lecam", "compare-tat", "continuity", "example1", "verify-all"):
        assert cmd in top
