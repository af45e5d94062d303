"""Command line round trips.

Each verb is driven through main() with an argv list; one smoke test
exercises the installed console script end to end.
"""

import json
import subprocess
import sys

import pytest

from kripkit.cli import main
from kripkit.model import build_example, model_from_dict, model_to_json


@pytest.fixture
def wedge_path(tmp_path):
    path = tmp_path / "wedge.json"
    path.write_text(model_to_json(build_example("wedge")))
    return str(path)


@pytest.fixture
def strict_path(tmp_path):
    path = tmp_path / "strict.json"
    path.write_text(model_to_json(build_example("wedge_strict")))
    return str(path)


def spine_paths(tmp_path):
    out = []
    for k in (1, 2):
        path = tmp_path / f"spine{k}.json"
        path.write_text(model_to_json(build_example("spines", (k,))))
        out.append(str(path))
    return out


def run_json(capsys, argv, expect=0):
    code = main(argv)
    captured = capsys.readouterr()
    assert code == expect, captured.err or captured.out
    return json.loads(captured.out)


def test_example_verb(capsys):
    data = run_json(capsys, ["example", "--name", "wedge"])
    assert data["states"] == ["x", "y", "z"]
    assert data["flavor"] == "standard"
    data = run_json(capsys, ["example", "--name", "spines(3)"])
    assert "s3_3" in data["states"]


def test_example_rejects_garbled_names(capsys):
    assert main(["example", "--name", "spines(two)"]) == 1
    assert "error:" in capsys.readouterr().err


def test_validate_verb(capsys, wedge_path, tmp_path):
    data = run_json(capsys, ["validate", "--model", wedge_path])
    assert data == {"ok": True, "strictly_condensed": False,
                    "violations": []}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "states": ["a", "b"], "leq_gen": [["a", "b"]],
        "valuation": {"p": ["a"]},
    }))
    data = run_json(capsys, ["validate", "--model", str(bad)])
    assert data["ok"] is False
    assert data["violations"] == [
        {"axiom": "valuation-upset", "witness": ["p", "a", "b"]}]


def test_eval_verb(capsys, wedge_path):
    data = run_json(capsys, ["eval", "--model", wedge_path,
                             "--formula", "p -> q"])
    assert data == {"truth_set": ["x", "z"]}


def test_eval_ck_reflexive_flag(capsys, tmp_path):
    path = tmp_path / "ek.json"
    path.write_text(json.dumps({
        "states": ["1", "2", "3"], "leq_gen": [],
        "boxes": [[["1", "2"]], [["2", "3"]]],
        "valuation": {"q": ["3"]}, "flavor": "ek",
    }))
    plain = run_json(capsys, ["eval", "--model", str(path),
                              "--formula", "C q"])
    refl = run_json(capsys, ["eval", "--model", str(path),
                             "--formula", "C q", "--ck-reflexive"])
    assert plain == {"truth_set": ["2", "3"]}
    assert refl == {"truth_set": ["3"]}


def test_bisim_verb(capsys, wedge_path, strict_path):
    data = run_json(capsys, ["bisim", "--left", wedge_path,
                             "--right", strict_path,
                             "--fragment", "biint", "--boxes", "1"])
    assert data["pairs"] == [["y", "y"], ["z", "z"]]
    assert data["rounds"] == 1
    last = data["removed"][-1]
    assert last == {"pair": ["x", "x"], "stage": 1, "clause": "box1_zag",
                    "side": "right", "transition": ["x", "z"]}


def test_bisim_seeded_sample(capsys, wedge_path, strict_path):
    argv = ["bisim", "--left", wedge_path, "--right", strict_path,
            "--fragment", "biint", "--boxes", "1"]
    data = run_json(capsys, argv + ["--seed", "7", "--depth", "2"])
    assert data["sample"] == {"formulas": 50, "disagreements": []}
    assert main(argv + ["--seed", "7"]) == 1
    assert "--depth" in capsys.readouterr().err


def test_flavor_flag_reinterprets_models(capsys, wedge_path):
    # the standard reading has no clause for C, the ek reading does
    assert main(["eval", "--model", wedge_path, "--formula", "C p"]) == 1
    assert "does not interpret" in capsys.readouterr().err
    data = run_json(capsys, ["eval", "--model", wedge_path,
                             "--flavor", "ek", "--formula", "C p"])
    assert data["truth_set"] == ["x", "y", "z"]
    # the same frame breaks the fs coherence axiom
    data = run_json(capsys, ["validate", "--model", wedge_path,
                             "--flavor", "fs"])
    assert data["ok"] is False
    assert data["violations"][0]["axiom"] == "fs-forward-coherence"


def test_equiv_verb(capsys, tmp_path):
    left, right = spine_paths(tmp_path)
    data = run_json(capsys, ["equiv", "--left", left, "--right", right,
                             "--fragment", "int", "--boxes", "1"])
    assert data["pairs"] == [["r", "s2_1"], ["s1_1", "s1_1"],
                             ["s1_1", "s2_2"]]
    root = [w for w in data["witnesses"] if w["pair"] == ["r", "r"]]
    assert root == [{"pair": ["r", "r"], "formula": "[]1 []1 F",
                     "orientation": "left", "stage": 2}]


def test_oracle_verb(capsys, wedge_path, strict_path):
    data = run_json(capsys, ["oracle", "--left", wedge_path,
                             "--right", strict_path,
                             "--fragment", "biint", "--boxes", "1"])
    assert data == {"pairs": [["x", "x"], ["y", "y"], ["z", "z"]],
                    "exact": True}
    data = run_json(capsys, ["oracle", "--left", wedge_path,
                             "--right", strict_path,
                             "--fragment", "biint", "--boxes", "1",
                             "--budget", "0"])
    assert data["exact"] is False


def test_hm_check_exit_codes(capsys, tmp_path):
    left, right = spine_paths(tmp_path)
    base = ["hm-check", "--left", left, "--right", right,
            "--fragment", "int", "--boxes", "1"]
    data = run_json(capsys, base)
    assert data["passed"] is True and data["problems"] == []
    data = run_json(capsys, base + ["--budget", "0"], expect=1)
    assert data["passed"] is False
    assert any("budget" in p for p in data["problems"])


def test_quotient_verb(capsys, tmp_path):
    _, spine2 = spine_paths(tmp_path)
    data = run_json(capsys, ["quotient", "--model", spine2,
                             "--fragment", "int", "--boxes", "1"])
    assert data["map"] == {"r": "r", "s1_1": "s1_1", "s2_1": "s2_1",
                           "s2_2": "s1_1"}
    assert data["model"]["states"] == ["r", "s1_1", "s2_1"]


def test_strictify_verb(capsys, wedge_path):
    data = run_json(capsys, ["strictify", "--model", wedge_path])
    assert model_from_dict(data) == build_example("wedge_strict")


def test_dualize_verb(capsys, wedge_path):
    data = run_json(capsys, ["dualize", "--model", wedge_path])
    m = model_from_dict(data)
    assert m.boxes == () and len(m.diamonds) == 1
    assert sorted(m.valuation["p"]) == ["x"]


def test_translate_verb(capsys):
    data = run_json(capsys, ["translate", "--formula", "p -> q"])
    assert data == {"formula": "q -< p"}
    assert main(["translate", "--formula", "p -> ->"]) == 1


def test_closure_verb(capsys, wedge_path):
    data = run_json(capsys, ["closure", "--model", wedge_path,
                             "--generators", "valuation",
                             "--ops", "arrow,boxbar_1"])
    assert data["algebra"] == [[], ["x"], ["z"], ["x", "z"], ["y", "z"],
                               ["x", "y", "z"]]
    data = run_json(capsys, ["closure", "--model", wedge_path,
                             "--generators", '[["z"]]', "--ops", ""])
    assert data["algebra"] == [[], ["z"], ["x", "y", "z"]]


def test_descriptive_check_verb(capsys, wedge_path, strict_path):
    algebra = json.dumps([[], ["x"], ["z"], ["x", "z"], ["y", "z"],
                          ["x", "y", "z"]])
    data = run_json(capsys, ["descriptive-check", "--model", wedge_path,
                             "--algebra", algebra])
    assert data == {"ok": False, "pair": ["x", "z"]}
    data = run_json(capsys, ["descriptive-check", "--model", strict_path,
                             "--algebra", algebra])
    assert data == {"ok": True, "pair": None}


def test_output_flag_writes_file(tmp_path, capsys, wedge_path):
    out = tmp_path / "result.json"
    assert main(["eval", "--model", wedge_path, "--formula", "p",
                 "--output", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text()) == {"truth_set": ["y", "z"]}


def test_missing_file_is_a_clean_error(capsys):
    assert main(["validate", "--model", "/no/such/file.json"]) == 1
    assert "error:" in capsys.readouterr().err


def test_output_is_deterministic(capsys, wedge_path, strict_path):
    argv = ["bisim", "--left", wedge_path, "--right", strict_path,
            "--fragment", "biint", "--boxes", "1"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_console_script_smoke():
    proc = subprocess.run(
        [sys.executable, "-m", "kripkit.cli", "example", "--name", "wedge"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["states"] == ["x", "y", "z"]
