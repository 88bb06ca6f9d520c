import dataclasses
import json
from fractions import Fraction

import pytest

from critfan import criticality
from critfan.cli import main


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def so8(tmp_path, n, ext="json"):
    if ext == "json":
        doc = {"group": [{"family": "SO_even", "rank": 4}], "representation": f"mult(std,{n})"}
        return write(tmp_path, "spec.json", json.dumps(doc))
    text = f'representation = "mult(std,{n})"\n\n[[group]]\nfamily = "SO_even"\nrank = 4\n'
    return write(tmp_path, "spec.toml", text)


def test_analyze_noncritical(tmp_path, capsys):
    assert main(["analyze", so8(tmp_path, 7)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["analysis"]["criticality"]["verdict"] == "NonCritical"
    assert len(doc["analysis"]["criticality"]["rays"]) == 5


def test_analyze_critical_toml(tmp_path, capsys):
    assert main(["analyze", so8(tmp_path, 4, "toml")]) == 3
    doc = json.loads(capsys.readouterr().out)
    assert doc["analysis"]["criticality"]["witnesses"]


def test_rank_zero(tmp_path, capsys):
    p = write(tmp_path, "bad.json", json.dumps({"group": [{"family": "GL", "rank": 0}], "representation": "std"}))
    assert main(["analyze", p]) == 1
    assert "rank" in capsys.readouterr().err


def test_unknown_key_no_output(tmp_path, capsys):
    out = tmp_path / "report.json"
    doc = {"group": [{"family": "GL", "rank": 1}], "representation": "std", "colour": "red"}
    p = write(tmp_path, "bad.json", json.dumps(doc))
    assert main(["analyze", p, "--out", str(out)]) == 1
    captured = capsys.readouterr()
    assert captured.out == "" and not out.exists()
    assert "colour" in captured.err


def test_central_trivial(tmp_path):
    doc = {"group": [{"family": "Torus", "rank": 1}], "representation": "weights([0])"}
    assert main(["analyze", write(tmp_path, "z.json", json.dumps(doc))]) == 4


def test_out_and_determinism(tmp_path):
    spec = so8(tmp_path, 3)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["analyze", spec, "--out", str(a), "--seedless"]) == 3
    assert main(["analyze", spec, "--out", str(b)]) == 3
    assert a.read_bytes() == b.read_bytes()
    prov = json.loads(a.read_text())["provenance"]
    assert len(prov["input_sha256"]) == 64


def test_text_format(tmp_path, capsys):
    assert main(["analyze", so8(tmp_path, 7), "--format", "text"]) == 0
    assert "NonCritical" in capsys.readouterr().out


def test_shift_override(tmp_path, capsys):
    doc = {"group": [{"family": "Torus", "rank": 1}], "representation": "std"}
    p = write(tmp_path, "t.json", json.dumps(doc))
    assert main(["analyze", p, "--shift", "haar"]) == 3
    assert json.loads(capsys.readouterr().out)["analysis"]["criticality"]["witnesses"] == [[1]]


def test_refine_and_derivative(tmp_path, capsys):
    spec = so8(tmp_path, 7)
    assert main(["refine", spec]) == 0
    capsys.readouterr()
    assert main(["derivative", spec, "--cone=-1,0,0,0"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert "derivative" in doc


def test_simulate(tmp_path, capsys):
    doc = {"group": [{"family": "GL", "rank": 1}], "representation": "std"}
    assert main(["simulate", write(tmp_path, "g.json", json.dumps(doc))]) == 0
    num = json.loads(capsys.readouterr().out)["numeric"]
    assert all(abs(f["slope"] - float(Fraction(f["prediction"]))) <= 0.05 for f in num["fits"])
    assert sorted(f["prediction"] for f in num["fits"]) == ["-1", "0"]
    assert all(p["residual"] < 1e-10 for p in num["poisson"])


def test_regularize(capsys):
    assert main(["regularize", "t_exp", "--format", "text"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "1.000000000"
    assert main(["regularize", "bessel", "--format", "text"]) == 0
    assert capsys.readouterr().out.startswith("0.227787745")
    assert main(["regularize", "exp"]) == 3
    assert main(["regularize", "nope"]) == 1


def test_selftest_filter(capsys):
    assert main(["selftest", "--filter", "kudla"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert {c["table"] for c in doc["cases"]} == {"kudla"}
    assert main(["selftest", "--filter", "no-such-table"]) == 1


def test_selftest_mutation(monkeypatch, capsys):
    real = criticality.build_root_datum

    def broken(g):
        rd = real(g)
        return dataclasses.replace(rd, two_rho=tuple(x + 1 for x in rd.two_rho))

    monkeypatch.setattr(criticality, "build_root_datum", broken)
    assert main(["selftest", "--filter", "kudla"]) == 2
    assert "FAILED kudla:" in capsys.readouterr().err
