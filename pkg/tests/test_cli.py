"""Command line behavior: reports, formats, exit codes, error paths."""

from __future__ import annotations

import json

import pytest

from ncfield import cli


def _run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _write_projection_pencil(tmp_path):
    doc = {
        "n_vars": 1,
        "rows": 2,
        "cols": 2,
        "coeffs": {
            "A0": [[0, 0], [0, 0]],
            "A1": [["1", "0"], ["0", "0"]],
        },
    }
    path = tmp_path / "projection.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_rank_of_expression_reports_rho(capsys):
    code, out, err = _run(capsys, ["rank", "--expr", "x1*x2 - x2*x1"])
    assert code == 0
    report = json.loads(out)
    assert report["command"] == "rank"
    assert report["rho"] == 1
    assert report["input"] == {"expr": "x1*x2 - x2*x1"}
    assert "rho = 1" in err


def test_rank_is_deterministic_output(capsys):
    argv = ["rank", "--expr", "x1*x2", "--seed", "7"]
    code_a, out_a, _ = _run(capsys, argv)
    code_b, out_b, _ = _run(capsys, argv)
    assert code_a == code_b == 0
    assert out_a == out_b


def test_rank_of_pencil_file(capsys, tmp_path):
    path = _write_projection_pencil(tmp_path)
    code, out, _ = _run(capsys, ["rank", "--pencil", path])
    assert code == 0
    report = json.loads(out)
    assert report["rho"] == 1
    assert report["rows"] == 2 and report["cols"] == 2


def test_rank_needs_exactly_one_input(capsys, tmp_path):
    code, _, err = _run(capsys, ["rank"])
    assert code == 1 and "exactly one" in err
    path = _write_projection_pencil(tmp_path)
    code, _, err = _run(capsys, ["rank", "--pencil", path, "--expr", "x1"])
    assert code == 1 and "exactly one" in err


def test_rank_rejects_csv(capsys):
    code, _, err = _run(capsys, ["rank", "--expr", "x1", "--format", "csv"])
    assert code == 1
    assert "no tabular form" in err


def test_bad_scalar_error_carries_the_json_path(capsys, tmp_path):
    doc = {
        "n_vars": 1,
        "rows": 2,
        "cols": 2,
        "coeffs": {
            "A0": [[0, 0], [0, 0]],
            "A1": [["1", "0"], ["0", "x"]],
        },
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = _run(capsys, ["rank", "--pencil", str(path)])
    assert code == 1
    assert "coeffs.A1[1][1]" in err


def test_missing_file_and_invalid_json_exit_one(capsys, tmp_path):
    code, _, err = _run(capsys, ["rank", "--pencil", str(tmp_path / "nope.json")])
    assert code == 1 and "cannot read" in err
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = _run(capsys, ["rank", "--pencil", str(path)])
    assert code == 1 and "invalid JSON" in err


def test_coefficient_key_mismatch_is_reported(capsys, tmp_path):
    doc = {
        "n_vars": 2,
        "rows": 1,
        "cols": 1,
        "coeffs": {"A0": [[0]], "A1": [[1]]},
    }
    path = tmp_path / "missing.json"
    path.write_text(json.dumps(doc))
    code, _, err = _run(capsys, ["rank", "--pencil", str(path)])
    assert code == 1
    assert "missing A2" in err


def test_eval_inverse_identity_residual(capsys):
    code, out, _ = _run(
        capsys, ["eval", "--expr", "x1*inv(x1)", "--d", "8", "--seed", "3"]
    )
    assert code == 0
    report = json.loads(out)
    assert report["residual_identity"] < 1e-9
    assert report["sigma_min"] > 0
    assert len(report["matrix"]) == 8
    assert report["residual_direct"] < 1e-9


def test_eval_adjoint_notation_uses_apostrophe(capsys):
    code, out, _ = _run(
        capsys, ["eval", "--expr", "x1'*inv(x1'*x1 + 1)", "--d", "6", "--seed", "4"]
    )
    assert code == 0
    report = json.loads(out)
    assert report["expr"].count("'") == 2


def test_eval_outside_domain_exits_three(capsys):
    code, out, err = _run(capsys, ["eval", "--expr", "inv(x1 - x1)", "--d", "6"])
    assert code == 3
    assert out == ""
    assert "out of domain" in err and "sigma_min" in err


def test_atoms_on_projection_pencil(capsys, tmp_path):
    path = _write_projection_pencil(tmp_path)
    code, out, err = _run(capsys, ["atoms", "--pencil", path])
    assert code == 0
    report = json.loads(out)
    assert report["entropy_dimension"] == "3/4"
    assert len(report["atoms"]) == 1
    atom = report["atoms"][0]
    assert atom["mass"] == "1/2" and atom["certified"]
    assert "1 certified atom(s)" in err


def test_atoms_csv_table(capsys, tmp_path):
    path = _write_projection_pencil(tmp_path)
    code, out, _ = _run(capsys, ["atoms", "--pencil", path, "--format", "csv"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "lambda,rho,mass,certified"
    assert lines[1].startswith("0,1,1/2,")


def test_atoms_entropy_needs_certification(capsys, tmp_path):
    path = _write_projection_pencil(tmp_path)
    code, out, err = _run(
        capsys,
        ["atoms", "--pencil", path, "--no-certify", "--entropy", "--d", "150"],
    )
    assert code == 2
    assert "inconclusive" in err


def test_dualcheck_passes_and_renders_csv(capsys):
    code, out, err = _run(capsys, ["dualcheck", "--n", "1", "--R", "3"])
    assert code == 0
    report = json.loads(out)
    assert report["all_pass"] and report["pairs"][0]["defect"] == "0"
    assert "pass=True" in err
    code, out, _ = _run(
        capsys, ["dualcheck", "--n", "2", "--R", "2", "--format", "csv"]
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "i,j,defect,pass"
    assert len(lines) == 5


def test_scan_integrality_small_corpus(capsys):
    code, out, err = _run(
        capsys,
        [
            "scan", "integrality", "--count", "3", "--size", "2",
            "--degree", "1", "--d", "80", "--seed", "11",
        ],
    )
    assert code == 0
    report = json.loads(out)
    assert len(report["rows"]) == 3
    assert isinstance(report["any_flagged"], bool)
    assert "3 matrices at d=80" in err


def test_scan_convergence_reports_strict_json(capsys):
    code, out, _ = _run(
        capsys,
        ["scan", "convergence", "--expr", "x1", "--dims", "6,12", "--seed", "2"],
    )
    assert code == 0
    report = json.loads(out)
    assert [r["d"] for r in report["rows"]] == [6, 12]
    for row in report["rows"]:
        assert row["rank_over_d"] == 1.0
        # full rank means an infinite gap, serialized as a string
        assert row["gap"] == "inf"


def test_scan_convergence_requires_dims(capsys):
    code, _, err = _run(capsys, ["scan", "convergence", "--expr", "x1"])
    assert code == 1
    assert "--dims" in err


def test_out_file_holds_the_report(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = _run(
        capsys, ["rank", "--expr", "x1", "--out", str(target)]
    )
    assert code == 0
    assert out == ""
    report = json.loads(target.read_text())
    assert report["rho"] == 1


def test_worker_env_validation(capsys, monkeypatch):
    monkeypatch.setenv("NCFIELD_THREADS", "2")
    code, _, _ = _run(capsys, ["rank", "--expr", "x1*x2"])
    assert code == 0
    monkeypatch.setenv("NCFIELD_THREADS", "many")
    code, _, err = _run(capsys, ["rank", "--expr", "x1*x2"])
    assert code == 1
    assert "NCFIELD_THREADS" in err


def test_tolerance_must_be_positive(capsys):
    code, _, err = _run(capsys, ["rank", "--expr", "x1", "--tol", "-1"])
    assert code == 1
    assert "--tol" in err


def test_bad_flag_exits_one_not_two(capsys):
    code, _, err = _run(capsys, ["rank", "--expr", "x1", "--dims", "2;4"])
    assert code == 1
    assert "comma-separated" in err
