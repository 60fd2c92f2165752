"""Command dispatch, output formats, exit codes, and determinism."""

from __future__ import annotations

import json
from pathlib import Path

from momentpde.cli import main

PROBLEMS = Path(__file__).parent / "problems"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_solve_outputs_solution_json(capsys):
    code, out, _ = run(capsys, "solve", PROBLEMS / "heat.json",
                       "--t-order", "6", "--z-degree", "20")
    assert code == 0
    payload = json.loads(out)
    assert payload["residual_max"] == "0"
    # u_2(0) = 4!/2! = 12
    entry = payload["entries"][2]
    constant = [c for c in entry["coefficients"] if c["powers"] == [0]]
    assert constant[0]["value"] == "12"


def test_polygon_command(capsys):
    code, out, _ = run(capsys, "polygon", PROBLEMS / "heat.json")
    assert code == 0
    payload = json.loads(out)
    assert payload["k1_inverse"] == "1"
    assert payload["vertices"] == [{"x": "1", "y": "-1"}, {"x": "2", "y": "0"}]
    assert payload["segments"][0]["slope"] == "1"


def test_estimate_pass_exit_zero(capsys):
    code, out, _ = run(capsys, "estimate", PROBLEMS / "qdiff.json")
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "PASS"
    assert payload["k1_inverse"] == "0"
    assert abs(payload["s_hat"]) <= 0.05


def test_estimate_fail_exit_one(capsys):
    # an impossible tolerance forces the FAIL exit path
    code, out, _ = run(capsys, "estimate", PROBLEMS / "heat.json",
                       "--t-order", "30", "--z-degree", "80",
                       "--window", "15,30", "--tolerance=-1/2")
    assert code == 1
    assert json.loads(out)["verdict"] == "FAIL"


def test_estimate_profile_mode(capsys):
    code, out, _ = run(capsys, "estimate", PROBLEMS / "heat.json",
                       "--t-order", "24", "--z-degree", "72",
                       "--mode", "nagumo_profile", "--window", "12,24")
    assert code == 0
    payload = json.loads(out)
    assert payload["alpha0"] == [3]
    assert payload["mode"] == "nagumo_profile"


def test_check_command(capsys):
    code, out, _ = run(capsys, "check", "--seed", "7", "--instances", "40")
    assert code == 0
    payload = json.loads(out)
    assert payload["all_pass"]
    assert payload["vandermonde"]["passed"]
    assert payload["submultiplicative"]["count"] == 40


def test_svg_command(tmp_path, capsys):
    out_path = tmp_path / "heat.svg"
    code, out, _ = run(capsys, "svg", PROBLEMS / "heat.json",
                       "--clip=-1,-2,3,1", "--out", out_path)
    assert code == 0
    text = out_path.read_text()
    assert text.startswith("<?xml")
    assert "<svg" in text and "</svg>" in text
    assert "1/k1 = 1" in text
    assert json.loads(out)["k1_inverse"] == "1"


def test_bad_file_exit_two(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "solve", bad)
    assert code == 2
    payload = json.loads(err)
    assert payload["error"] == "ProblemFormatError"


def test_validation_failure_exit_two(capsys, tmp_path):
    doc = json.loads((PROBLEMS / "heat.json").read_text())
    doc["terms"][0]["j"] = 5  # valuation assumption breaks
    path = tmp_path / "invalid.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "estimate", path)
    assert code == 2
    payload = json.loads(err)
    assert payload["error"] == "ValidationError"
    assert any(not c["passed"] for c in payload["report"]["checks"])


def test_byte_identical_reruns(capsys):
    _, first, _ = run(capsys, "solve", PROBLEMS / "heat.json",
                      "--t-order", "8", "--z-degree", "30")
    _, second, _ = run(capsys, "solve", PROBLEMS / "heat.json",
                       "--t-order", "8", "--z-degree", "30")
    assert first == second
    _, check_a, _ = run(capsys, "check", "--seed", "3", "--instances", "25")
    _, check_b, _ = run(capsys, "check", "--seed", "3", "--instances", "25")
    assert check_a == check_b


def test_backend_override(capsys):
    code, out, _ = run(capsys, "solve", PROBLEMS / "heat.json",
                       "--t-order", "4", "--z-degree", "12",
                       "--backend", "bigfloat", "--precision", "128")
    assert code == 0
    payload = json.loads(out)
    assert payload["backend"] == {"backend": "bigfloat", "precision_bits": 128}
    entry = payload["entries"][1]
    constant = [c for c in entry["coefficients"] if c["powers"] == [0]]
    assert constant[0]["value"] == "2"  # exact even through the float backend


def test_out_flag_writes_file(tmp_path, capsys):
    out_path = tmp_path / "polygon.json"
    code, out, _ = run(capsys, "polygon", PROBLEMS / "heat.json",
                       "--out", out_path)
    assert code == 0
    assert out == ""
    assert json.loads(out_path.read_text())["k1_inverse"] == "1"
