import json

import numpy as np

from src.main import main
from src.tools.symplinalg import rotation


def write_doc(tmp_path, doc) -> str:
    path = tmp_path / "path.json"
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, argv):
    code = main(argv)
    return code, capsys.readouterr().out


def test_index_oscillator(tmp_path, capsys):
    doc = {"version": 1, "label": "osc", "generator": {"name": "oscillator_2d", "params": {"wx": 1.0, "wy": float(np.sqrt(2.0))}}}
    code, out = run(capsys, ["index", write_doc(tmp_path, doc)])
    assert code == 0
    report = json.loads(out)
    assert report["label"] == "osc"
    assert report["gutzwiller_mu"] == 5
    assert report["nu"] == -5
    assert report["cz_oracle"].startswith("n/a")


def test_index_alpha_power(tmp_path, capsys):
    doc = {"version": 1, "generator": {"name": "alpha_power", "params": {"r": 2}}}
    code, out = run(capsys, ["index", write_doc(tmp_path, doc)])
    assert code == 0
    report = json.loads(out)
    assert report["nu"] == 4
    assert report["mu_rel"]["l_P"] == 8
    assert report["classification"] == "Sp0"


def test_index_free_rotation_cross_checks(tmp_path, capsys):
    doc = {"version": 1, "generator": {"name": "rotation", "params": {"chi": 0.6 * np.pi}}}
    code, out = run(capsys, ["index", write_doc(tmp_path, doc)])
    assert code == 0
    report = json.loads(out)
    assert report["nu"] == -1
    assert report["concavity"] == 1
    assert report["cz_oracle"] == -1
    assert all(check["status"] != "fail" for check in report["cross_check"])
    assert {check["name"] for check in report["cross_check"]} >= {"nu_vs_cz_oracle", "nu_vs_concavity", "det_sign"}


def test_index_samples(tmp_path, capsys):
    times = np.linspace(0.0, 1.0, 9)
    doc = {
        "version": 1,
        "samples": {"times": times.tolist(), "matrices": [rotation(-np.pi * t).ravel().tolist() for t in times]},
    }
    code, out = run(capsys, ["--format", "human", "index", write_doc(tmp_path, doc)])
    assert code == 0
    assert "nu             1" in out


def test_index_rejects_non_symplectic_samples(tmp_path, capsys):
    doc = {"version": 1, "samples": {"times": [0.0, 1.0], "matrices": [[1, 0, 0, 1], [2, 0, 0, 1]]}}
    code, _ = run(capsys, ["index", write_doc(tmp_path, doc)])
    assert code == 2


def test_index_rejects_bad_documents(tmp_path, capsys):
    code, _ = run(capsys, ["index", write_doc(tmp_path, {"version": 1})])
    assert code == 2
    code, _ = run(capsys, ["index", write_doc(tmp_path, {"version": 1, "generator": {"name": "spiral"}})])
    assert code == 2
    code, _ = run(capsys, ["index", str(tmp_path / "missing.json")])
    assert code == 2


def test_oscillator_table(capsys):
    code, out = run(capsys, ["oscillator-table", "--wx", "1", "--wy", str(np.sqrt(2.0)), "--reps", "3"])
    assert code == 0
    rows = json.loads(out)
    assert [row["mu"] for row in rows] == [5, 9, 15]
    assert all(row["match"] for row in rows)


def test_oscillator_table_equal_frequencies(capsys):
    code, out = run(capsys, ["--format", "human", "oscillator-table", "--wx", "1", "--wy", "1", "--reps", "2"])
    assert code == 0
    assert "MISMATCH" not in out


def test_verify_is_deterministic(capsys):
    code, first = run(capsys, ["verify", "cayley", "--seed", "3", "--count", "5"])
    assert code == 0
    _, second = run(capsys, ["verify", "cayley", "--seed", "3", "--count", "5"])
    assert first == second
    summary = json.loads(first)[0]
    assert summary["passed"] and summary["checks"]["sum_inverse"] == 5


def test_verify_unknown_suite(capsys):
    code, _ = run(capsys, ["verify", "everything"])
    assert code == 2
