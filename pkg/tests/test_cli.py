import csv
import io
import json

import pytest

from collimator.cli import SWEEP_COLUMNS, main, sweep_rows


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_writes_report(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, _, _ = run_cli(capsys, "run", "--n", "36", "--mode", "heuristic", "--schedule", "auto",
                         "--seed", "7", "--out", str(path))
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc["schema"] == 1
    assert doc["parity"] == doc["ground_truth_parity"]
    assert set(doc["ledger"]) >= {"oracle_queries", "classical_ops", "peak_qubits"}
    assert len(doc["levels"]) == len(doc["schedule"]["levels"])


def test_run_regev_shows_length_two(capsys):
    code, out, _ = run_cli(capsys, "run", "--n", "16", "--mode", "regev", "--seed", "1",
                           "--retry-budget", "1000000")
    assert code == 0
    doc = json.loads(out)
    assert doc["leaf_length_max"] == 2
    assert all(lv["kept_min"] == lv["kept_max"] == 2 for lv in doc["levels"])


def test_run_explicit_levels(capsys):
    code, out, _ = run_cli(capsys, "run", "--n", "6", "--levels", "3,2", "--r", "2,2", "--ell0", "16",
                           "--secret", "41", "--seed", "0")
    assert code == 0
    assert json.loads(out)["parity"] == 1


def test_run_accepts_hex_secret(capsys):
    code, out, _ = run_cli(capsys, "run", "--n", "10", "--secret", "0x2a", "--seed", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["secret"] == 42 and doc["parity"] == 0


def test_run_is_deterministic(capsys):
    args = ("run", "--n", "20", "--seed", "5")
    assert run_cli(capsys, *args)[1] == run_cli(capsys, *args)[1]


def test_invalid_config_exit_code(capsys):
    code, _, err = run_cli(capsys, "run", "--n", "6", "--levels", "3,3")
    assert code == 2 and "error" in err
    assert run_cli(capsys, "run", "--n", "6", "--levels", "3,2", "--r", "2")[0] == 2
    assert run_cli(capsys, "sweep", "--n", "0", "--trials", "1")[0] == 2


def test_retry_exhaustion_exit_code(capsys):
    code, _, _ = run_cli(capsys, "run", "--n", "6", "--levels", "5", "--ell0", "2", "--secret", "9",
                         "--retry-budget", "0")
    assert code == 3


def test_recover_reports_ground_truth(capsys):
    code, out, err = run_cli(capsys, "recover", "--n", "24", "--secret", "random", "--seed", "5")
    assert code == 0
    doc = json.loads(out)
    assert doc["success"] and doc["recovered"] == doc["ground_truth"]
    assert f"recovered secret {doc['ground_truth']}" in err
    assert len(doc["bits"]) == 24


def test_sweep_csv(tmp_path, capsys):
    path = tmp_path / "out.csv"
    assert run_cli(capsys, "sweep", "--n", "8,16", "--trials", "3", "--csv", str(path))[0] == 0
    raw = path.read_bytes()
    assert b"\r\n" in raw
    rows = list(csv.DictReader(io.StringIO(raw.decode())))
    assert tuple(rows[0]) == SWEEP_COLUMNS
    assert [(r["n"], r["seed"]) for r in rows] == [(n, s) for n in ("8", "16") for s in ("0", "1", "2")]
    for row in rows:
        assert row["success"] in ("0", "1")
        for col in SWEEP_COLUMNS:
            if col not in ("mode",):
                assert float(row[col]) >= 0


def test_sweep_is_deterministic_apart_from_wall_time():
    strip = lambda rows: [{k: v for k, v in r.items() if k != "wall_ms"} for r in rows]  # noqa: E731
    a = sweep_rows([8, 12], 3, "heuristic")
    b = sweep_rows([8, 12], 3, "heuristic", threads=2)
    assert strip(a) == strip(b)


def test_verify_summary(capsys):
    code, out, _ = run_cli(capsys, "verify", "--max-dim", "4096", "--trials", "200", "--seed", "9")
    assert code == 0
    assert out.splitlines()[0] == "200/200 dense checks passed"


def test_costmodel(capsys):
    code, out, _ = run_cli(capsys, "costmodel", "--n", "50")
    assert code == 0
    doc = json.loads(out)
    assert doc["g"][10] == 4
    assert doc["predicted_log2_cost"]["new"] == pytest.approx(10.0)
    assert sum(lv["m"] for lv in doc["schedule"]["levels"]) == 49
