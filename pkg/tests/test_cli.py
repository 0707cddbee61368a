import json
import subprocess
import sys

import pytest

from qesalg.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def solved(tmp_path, capsys):
    paths = {}
    for order in (1, 2):
        p = tmp_path / f"t2r{order}.json"
        code, out, _ = run(capsys, "solve", "--family", "triangle", "--n", "2",
                           "--order", str(order), "--out", str(p))
        assert code == 0
        paths[order] = p
    return paths


def test_solve_reports_dims(solved, capsys):
    assert json.loads(solved[1].read_text())["dim"] == 9
    assert json.loads(solved[2].read_text())["dim"] == 36
    code, out, _ = run(capsys, "solve", "--family", "rectangle", "--n", "3", "--order", "1",
                       "--out", str(solved[1].parent / "r3.json"))
    assert code == 0 and "dim 7" in out


def test_solve_small_n_warning(tmp_path, capsys):
    code, out, _ = run(capsys, "solve", "--family", "triangle", "--n", "0", "--order", "2",
                       "--out", str(tmp_path / "t0.json"))
    assert code == 0
    assert "small-n" in out
    assert json.loads((tmp_path / "t0.json").read_text())["warnings"]


def test_solve_to_stdout_and_env_dir(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("QESALG_OUT_DIR", raising=False)
    code, out, err = run(capsys, "solve", "--family", "triangle", "--n", "2", "--order", "1")
    assert code == 0 and json.loads(out)["dim"] == 9 and "dim 9" in err
    monkeypatch.setenv("QESALG_OUT_DIR", str(tmp_path / "outdir"))
    code, out, _ = run(capsys, "solve", "--family", "triangle", "--n", "2", "--order", "1")
    assert code == 0
    assert json.loads((tmp_path / "outdir" / "triangle-2-r1.json").read_text())["dim"] == 9


def test_solve_bad_args(capsys):
    assert run(capsys, "solve", "--family", "triangle", "--order", "1")[0] == 2
    assert run(capsys, "solve", "--family", "triangle", "--n", "-1", "--order", "1")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--family", "hexagon", "--n", "2", "--order", "1"])
    assert exc.value.code == 2


def test_solve_deterministic(tmp_path, capsys):
    outs = []
    for i in range(2):
        p = tmp_path / f"a{i}.json"
        run(capsys, "solve", "--family", "triangle", "--n", "3", "--order", "2", "--out", str(p))
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_custom_space(tmp_path, capsys):
    sp = tmp_path / "space.json"
    sp.write_text(json.dumps({"dim": 1, "exps": [[0], [1]]}))
    out = tmp_path / "b.json"
    code, _, _ = run(capsys, "solve", "--family", "custom", "--space", str(sp), "--order", "1",
                     "--out", str(out))
    assert code == 0 and json.loads(out.read_text())["dim"] == 4
    code, text, _ = run(capsys, "verify", str(out))
    assert code == 0 and "skipped" in text


def test_verify_pass_and_mutation(solved, tmp_path, capsys):
    code, out, _ = run(capsys, "verify", str(solved[2]))
    assert code == 0 and out.count("PASS") == 3
    obj = json.loads(solved[1].read_text())
    # corrupt one coefficient of the element containing x^2*Dx
    for el in obj["basis"]:
        for term in el["terms"]:
            for t in term["coeff"]["terms"]:
                if term["deriv"] == [1, 0] and t["exp"] == [2, 0]:
                    t["c"] = "7"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    code, out, _ = run(capsys, "verify", str(bad))
    assert code == 1
    assert "FAIL invariance" in out and "monomial" in out


def test_verify_empty_basis(tmp_path, capsys):
    p = tmp_path / "empty.json"
    p.write_text(json.dumps({"space": {"dim": 2, "exps": [[0, 0]], "label": "triangle:0"},
                             "order": 0, "dim": 0, "basis": []}))
    code, out, _ = run(capsys, "verify", str(p))
    assert code == 0 and "FAIL" not in out


def test_lie_and_envelope(solved, tmp_path, capsys):
    code, out, _ = run(capsys, "lie", str(solved[1]))
    rep = json.loads(out)
    assert code == 0
    assert (rep["dim"], rep["derived_dim"], rep["center_dim"]) == (9, 8, 1)
    code, out, _ = run(capsys, "envelope", str(solved[1]), "--compare", str(solved[2]))
    rep = json.loads(out)
    assert code == 0 and rep["span_equal"] and rep["envelope_dim"] == 36


def test_lie_closure_failure(tmp_path, capsys):
    from qesalg.opdsl import parse_op
    p = tmp_path / "pair.json"
    p.write_text(json.dumps({"space": {"dim": 1, "exps": [[0]]}, "order": 1, "dim": 2,
                             "basis": [parse_op("Dx", 1).to_json(), parse_op("x^2*Dx", 1).to_json()]}))
    code, out, _ = run(capsys, "lie", str(p))
    rep = json.loads(out)
    assert code == 0 and not rep["closes"] and rep["failure"]["residual"] == "2*x*Dx"
    assert run(capsys, "lie", str(p), "--require-closure")[0] == 1


def test_spectrum_command(tmp_path, capsys):
    csv_path = tmp_path / "roots.csv"
    code, out, _ = run(capsys, "spectrum", "--op", "x*Dx + 2*y*Dy", "--family", "triangle",
                       "--n", "2", "--csv", str(csv_path))
    rep = json.loads(out)
    assert code == 0
    roots = [round(r["re"], 9) for r in rep["roots"] for _ in range(r["mult"])]
    assert roots == [0, 1, 2, 2, 3, 4]
    assert csv_path.read_text().splitlines()[0] == "re,im,mult"
    code, out, _ = run(capsys, "spectrum", "--op", "x^3", "--family", "triangle", "--n", "2")
    assert code == 1 and json.loads(out)["error"] == "invariance"
    assert run(capsys, "spectrum", "--op", "x**2", "--family", "triangle", "--n", "2")[0] == 2


def test_susy_command(capsys):
    code, out, _ = run(capsys, "susy", "--a", "Dx + x", "--h", "-Dx^2 + x^2")
    rep = json.loads(out)
    assert code == 0
    assert rep["L"] == "2" and rep["P"] == ["1", "1"] and rep["commutator_vanishes"]
    assert rep["Hbold"][1][1] == "-Dx^2 + x^2 + 2"
    code, out, _ = run(capsys, "susy", "--a", "Dx", "--h", "x")
    assert code == 1 and json.loads(out)["error"] == "cofactor"


def test_reduce_command(solved, capsys):
    code, out, _ = run(capsys, "reduce", "--op", str(solved[2]), "--element", "5",
                       "--family", "triangle", "--n", "2")
    rep = json.loads(out)
    assert code == 0 and rep["all_zero"] and len(rep["reductions"]) == 4
    code, out, _ = run(capsys, "reduce", "--op", "x^4", "--family", "triangle", "--n", "2", "--strict")
    assert code == 1 and not json.loads(out)["all_zero"]


def test_selftest_command(capsys):
    code, out, _ = run(capsys, "--threads", "2", "selftest", "--seed", "3", "--cases", "5")
    assert code == 0 and "FAIL" not in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qesalg", "solve", "--family", "triangle",
                          "--n", "2", "--order", "1"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["dim"] == 9
