from __future__ import annotations

import csv
import io
import json

import pytest

from mtqc.cli import encode, main, parse_grid, read_config

SIM = ["simulate", "--variant", "mtqc2", "--n", "8", "--m", "2", "--eta", "0.01", "--d", "3,5,7",
       "--pz", "0.02:0.05:0.005", "--trials", "60", "--seed", "42"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_grid_parsing():
    assert parse_grid("0.02:0.05:0.005") == [0.02, 0.025, 0.03, 0.035, 0.04, 0.045, 0.05]
    assert parse_grid("0.1,0.2") == [0.1, 0.2]
    with pytest.raises(Exception):
        parse_grid("0.1:0.05:0.01")


def test_simulate_row_count(capsys):
    code, out, _ = run(capsys, *SIM, "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 21
    assert {r["d"] for r in rows} == {"3", "5", "7"}


def test_simulate_byte_identical_across_workers(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([*SIM, "--format", "csv", "--workers", "1", "--output", str(a)]) == 0
    assert main([*SIM, "--format", "csv", "--workers", "2", "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_even_distance_rejected(capsys):
    code, out, err = run(capsys, "simulate", "--d", "4", "--pz", "0.01")
    assert code == 1 and out == ""
    assert "code distance must be odd" in err
    assert err.count("\n") == 1


def test_usage_errors_exit_one(capsys):
    assert run(capsys, "simulate")[0] == 1
    assert run(capsys, "nonsense")[0] == 1
    assert run(capsys, "simulate", "--pz", "0.01", "--seed", str(2**64))[0] == 1
    assert run(capsys, "resources", "--eta", "0.7")[0] == 1


def test_threshold_supercritical_exit_two(capsys):
    code, out, err = run(capsys, "threshold", "--variant", "mtqc1", "--d", "3,5", "--pz", "0.3,0.35,0.4",
                         "--trials", "40", "--pf", "0")
    assert code == 2
    assert "no threshold" in err and out == ""


def test_csv_json_round_trip(capsys):
    _, js, _ = run(capsys, *SIM[:-6], "--pz", "0.03,0.04", "--trials", "50", "--seed", "7", "--format", "json")
    _, cs, _ = run(capsys, *SIM[:-6], "--pz", "0.03,0.04", "--trials", "50", "--seed", "7", "--format", "csv")
    recs = json.loads(js)
    rows = list(csv.DictReader(io.StringIO(cs)))
    assert len(recs) == len(rows) == 6
    for rec, row in zip(recs, rows):
        assert list(rec) == list(row)
        for k, v in rec.items():
            if v is None:
                assert row[k] == ""
            elif isinstance(v, (int, float)) and not isinstance(v, bool):
                assert float(row[k]) == v
            else:
                assert row[k] == str(v)


def test_encode_floats_round_trip():
    vals = [0.1 + 0.2, 1 / 3, 4.578e-3]
    text = encode([{"x": v} for v in vals], "csv")
    assert [float(r["x"]) for r in csv.DictReader(io.StringIO(text))] == vals
    assert [r["x"] for r in json.loads(encode([{"x": v} for v in vals], "json"))] == vals


def test_resources_star(capsys):
    code, out, _ = run(capsys, "resources", "--n", "8", "--m", "2", "--eta", "0.01", "--variant", "mtqc1",
                       "--paper-constants")
    assert code == 0
    assert round(json.loads(out)[0]["N_star"]) == 1962


def test_plan_ghz(capsys):
    code, out, _ = run(capsys, "plan-ghz", "--m", "10", "--format", "json")
    rec = json.loads(out)[0]
    assert code == 0 and rec["depth"] == 3 and rec["N_lossless"] == 64
    assert run(capsys, "plan-ghz", "--m", "2")[0] == 1


def test_ppo(capsys):
    _, out, _ = run(capsys, "ppo")
    got = {r["state"]: r["ppo"] for r in json.loads(out)}
    assert got["GHZ4"] == 2 and got["GHZ9"] == 34 and got["C3'(8,2,8)"] == 218 and got["C3(8,8,8)"] == 378


def test_loss_budget(capsys):
    code, out, _ = run(capsys, "loss-budget", "--eta", "0.0458", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["kappa"] for r in rows] == ["3", "4"]
    assert run(capsys, "loss-budget")[0] == 1


def test_verify_optics_exit(capsys):
    code, out, _ = run(capsys, "verify-optics", "--trials", "100000", "--format", "table")
    assert code == 0 and "FAIL" not in out


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\nvariant = mtqc1\nd = 3\npz = 0.03\ntrials = 40\nseed = 5\npaper_constants = false\n")
    assert read_config(str(cfg))[:2] == ["--variant", "mtqc1"]
    _, out, _ = run(capsys, "simulate", "--config", str(cfg))
    rec = json.loads(out)
    assert len(rec) == 1 and rec[0]["variant"] == "mtqc1" and rec[0]["seed"] == 5
    _, out, _ = run(capsys, "simulate", "--config", str(cfg), "--seed", "9", "--d", "3,5")
    rec = json.loads(out)
    assert [r["seed"] for r in rec] == [9, 9] and [r["d"] for r in rec] == [3, 5]
    bad = tmp_path / "bad.cfg"
    bad.write_text("no equals sign\n")
    assert run(capsys, "simulate", "--config", str(bad))[0] == 1
