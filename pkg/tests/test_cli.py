import json
import subprocess
import sys

import pytest

from qtorsion.cli import main
from qtorsion.io import load_complex, load_polytope

from conftest import DATA


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_ok_and_fail(capsys):
    code, out, _ = run(capsys, "validate", DATA / "square.json")
    assert code == 0 and "polytope: ok" in out and "char: ok" in out
    code, out, _ = run(capsys, "validate", DATA / "bad_cube.json")
    assert code == 1 and "simplicity" in out
    code, out, _ = run(capsys, "validate", DATA / "cube_edge_collapse.json")
    assert code == 1 and "F1^F2^F3" in out


def test_missing_file_and_bad_facet(capsys, tmp_path):
    code, _, err = run(capsys, "info", tmp_path / "nope.json")
    assert code == 2 and "cannot read" in err
    code, _, err = run(capsys, "wedge", DATA / "square.json", "--facet", "Q9")
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "info", bad)[0] == 2


def test_argparse_usage_exit():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_info_json(capsys):
    code, out, _ = run(capsys, "info", DATA / "square.json", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["f_vector"] == [4, 4]
    assert sorted(v["order"] for v in data["vertices"]) == [1, 4, 17, 47]


def test_wedge_output_reparses(capsys, tmp_path):
    dest = tmp_path / "w.json"
    code, out, _ = run(capsys, "wedge", DATA / "square.json", "--facet", "F4", "--k", 2, "--a", 2,
                       "-o", dest)
    assert code == 0 and "6 facets and 8 vertices" in out
    W, lw = load_polytope(dest)
    assert (W.n_facets, W.n_vertices) == (6, 8) and lw is not None


def test_wedge_a_one_fails(capsys):
    code, _, err = run(capsys, "wedge", DATA / "square.json", "--facet", "F4", "--k", 2, "--a", 1)
    assert code == 1 and "a = 1" in err


def test_blowup_with_vector(capsys, tmp_path):
    dest = tmp_path / "b.json"
    code, out, _ = run(capsys, "blowup", DATA / "prism_unit_repaired.json",
                       "--face", "T2,QAB,QBC", "--vector", "2,5,2", "-o", dest)
    assert code == 0 and "6 facets, 8 vertices" in out
    Q, lq = load_polytope(dest)
    assert lq[Q.n_facets - 1] == (2, 5, 2)
    assert run(capsys, "blowup", DATA / "prism_unit_repaired.json", "--face", "T2,QAB,QBC",
               "--vector", "2,5")[0] == 2


def test_blowdown(capsys):
    code, out, _ = run(capsys, "blowdown", DATA / "cube_edge_collapse_repaired.json", "--facet", "Ft",
                       "--face", "Ft,F1", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["facet_map"]["Ft"] == "F0,F1"
    assert len(data["result"]["vertices"]) == 6
    code, _, err = run(capsys, "blowdown", DATA / "cube_edge_collapse.json", "--facet", "Ft", "--face", "Ft,F1")
    assert code == 1 and "invalid characteristic map" in err
    code, _, err = run(capsys, "blowdown", DATA / "cube_edge_collapse_repaired.json", "--facet", "F0",
                       "--face", "F0,F2,Ft")
    assert code == 1 and "ProductStructureError" in err


def test_retract_and_trace(capsys):
    code, out, _ = run(capsys, "trace", DATA / "square.json", "--order", "F2^F3,F1^F2,F1^F4,F3^F4",
                       "--format", "json")
    assert code == 0 and json.loads(out)["trace"] == [17, 1, 1, 1]
    code, out, _ = run(capsys, "retract", DATA / "square.json", "--prime", 2, "--format", "json")
    assert code == 0 and all(q % 2 for q in json.loads(out)["trace"])
    code, _, _ = run(capsys, "trace", DATA / "square.json", "--order", "v0,v2,v1,v3")
    assert code == 1


def test_torsion_blowdown_example(capsys):
    code, out, _ = run(capsys, "torsion", DATA / "cube_edge_collapse_repaired.json", "--blowdown",
                       "--facet", "Ft", "--face", "Ft,F1", "--prime", 5, "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["conclusion"] == "no-p-torsion"
    assert 3 in data["a3"]["d_values"].values()


def test_torsion_refusal_exit_code(capsys):
    code, out, _ = run(capsys, "torsion", DATA / "square.json", "--wedge", "--facet", "F4",
                       "--a", 3, "--prime", 2)
    assert code == 1 and "precondition" in out
    assert run(capsys, "torsion", DATA / "square.json")[0] == 2
    assert run(capsys, "torsion", DATA / "square.json", "--prime", 3, "--blowdown", "--wedge")[0] == 2


def test_scan(capsys):
    code, out, _ = run(capsys, "scan", DATA / "square.json")
    assert "relevant primes: [2, 17, 47]" in out
    assert code == 0 and "torsion free: yes" in out


def test_dualize_and_swedge(capsys, tmp_path):
    dual = tmp_path / "d.json"
    code, out, _ = run(capsys, "dualize", DATA / "square.json", "-o", dual)
    assert code == 0 and "4 vertices, 4 maximal simplices" in out
    code, out, _ = run(capsys, "swedge", dual, "--vertex", "F4", "--k", 2)
    assert code == 0 and "6 vertices, 8 maximal simplices, pure" in out
    code, out, _ = run(capsys, "swedge", dual, "--vertex", "F4", "--k", 2, "--literal")
    assert "not pure" in out
    assert run(capsys, "swedge", dual, "--vertex", "nope")[0] == 2
    assert load_complex(dual).is_pure


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qtorsion", "validate", str(DATA / "square.json")],
                         capture_output=True, text=True, timeout=60)
    assert res.returncode == 0 and "polytope: ok" in res.stdout
