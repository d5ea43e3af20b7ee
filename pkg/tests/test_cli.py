"""CLI contract tests: output shapes, exit codes, manifests, determinism."""

from __future__ import annotations

import json

import pytest

from owk import green
from owk.cli import dispatch


def _read(path):
    with open(path) as fh:
        return fh.read()


def test_phi_csv_shape(tmp_path):
    out = tmp_path / "phi.csv"
    assert dispatch(["phi", "--grid", "1000", "-o", str(out)]) == 0
    lines = _read(out).strip().split("\n")
    assert lines[0] == "t,phi_prob,phi_closed,absdiff"
    assert len(lines) == 1001
    last = lines[-1].split(",")
    assert float(last[3]) < 1e-9
    assert (tmp_path / "phi.csv.manifest.json").exists()


def test_gamma_csv_matches_library(tmp_path):
    out = tmp_path / "g.csv"
    assert dispatch(["gamma", "--x", "0,5", "-o", str(out)]) == 0
    rows = _read(out).strip().split("\n")[1:]
    assert len(rows) == 2
    x, val, scaled = rows[1].split(",")
    assert int(x) == 5
    assert float(val) == pytest.approx(green.gamma(5), abs=1e-15)


def test_green_json_payload(tmp_path):
    out = tmp_path / "green.json"
    assert dispatch(["green", "--y", "50,10", "-o", str(out)]) == 0
    payload = json.loads(_read(out))
    assert payload["y"] == [50, 10]
    assert payload["value"] == pytest.approx(green.green_halfplane(0, (50, 10)))
    assert payload["embedded"] is False


def test_nu_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert dispatch(["nu", "--y", "0,2", "-o", str(a)]) == 0
    assert dispatch(["nu", "--y", "0,2", "-o", str(b)]) == 0
    assert _read(a) == _read(b)
    manifest = json.loads(_read(tmp_path / "a.csv.manifest.json"))
    assert manifest["tool"] == "owk"
    assert "tail_bound" in manifest["diagnostics"]


def test_mu_csv_shape(tmp_path):
    out = tmp_path / "mu.csv"
    assert dispatch(["mu", "--x", "0,2", "--y1", "5", "--u-max", "10",
                     "-o", str(out)]) == 0
    lines = _read(out).strip().split("\n")
    assert lines[0] == "u,mu" and len(lines) == 12


def test_simulate_summary_and_episodes(tmp_path):
    out = tmp_path / "sim.json"
    eps = tmp_path / "eps.csv"
    assert dispatch(["simulate", "--start", "0,0", "--n", "500",
                     "--seed", "5", "-o", str(out), "--episodes", str(eps)]) == 0
    summary = json.loads(_read(out))
    assert summary["n_episodes"] == 500
    assert 0.0 <= summary["truncation_rate"] <= 1.0
    lines = _read(eps).strip().split("\n")
    assert lines[0] == "episode,tau1,x_sigma1,horizontal_steps,truncated"
    assert len(lines) == 501


def test_martin_csv_from_origin(tmp_path):
    out = tmp_path / "m.csv"
    assert dispatch(["martin", "--x", "0,0", "--sweep", "lambda=0",
                     "--mc-budget", "10", "--format", "csv",
                     "-o", str(out)]) == 0
    lines = _read(out).strip().split("\n")
    assert lines[0] == "y1,y2,K,first_term,err"
    for row in lines[1:]:
        _, _, k, first, _ = row.split(",")
        assert float(k) == pytest.approx(1.0, abs=1e-10)
        assert float(first) == 0.0


def test_config_file_overrides_flags(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid": 5}))
    out = tmp_path / "phi.csv"
    assert dispatch(["--config", str(cfg), "phi", "--grid", "99",
                     "-o", str(out)]) == 0
    assert len(_read(out).strip().split("\n")) == 6


def test_exit_code_validation_error():
    assert dispatch(["green", "--y", "nope"]) == 1
    assert dispatch(["nope-subcommand"]) == 1
    assert dispatch([]) == 1
    assert dispatch(["green", "--y", "3,1", "--embedded"]) == 1


def test_exit_code_numeric_error(tmp_path):
    out = tmp_path / "nu.csv"
    assert dispatch(["nu", "--y", "0,1", "--tail-tol", "1e-9",
                     "-o", str(out)]) == 2


def test_exit_code_unknown_config_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"no_such_flag": 1}))
    assert dispatch(["--config", str(cfg), "phi"]) == 1


def test_verify_fast_suite_exit_zero(tmp_path):
    out = tmp_path / "v.json"
    assert dispatch(["verify", "--suite", "poisson", "--scale", "0.05",
                     "-o", str(out)]) == 0
    summary = json.loads(_read(out))
    assert summary["all_passed"] is True
    assert "_wall_time" not in summary
