"""End-to-end command-line behaviour: flag parsing, JSON/CSV payloads,
schema conformance, determinism, and exit codes."""

import csv
import json
import math
from importlib import resources

import jsonschema
import pytest

from microrev.cli import (
    EXPERIMENT_HEADER,
    FIG3_HEADER,
    UPSILON_HEADER,
    UsageError,
    main,
    parse_complex,
)


def load_schema(name: str) -> dict:
    path = resources.files("microrev") / "schemas" / name
    return json.loads(path.read_text(encoding="utf-8"))


def run_cli(argv, capsys):
    """Invoke main() and return (exit_code, stdout, stderr); argparse's own
    rejections surface as SystemExit and are mapped to their code."""
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


# ----------------------------------------------------------------- parsing


def test_parse_complex_forms():
    assert parse_complex("1+0.5i") == 1.0 + 0.5j
    assert parse_complex("0.5i") == 0.5j
    assert parse_complex("-i") == -1j
    assert parse_complex("2") == 2.0 + 0j
    assert parse_complex("1.5e-2-2E1I") == 0.015 - 20j
    assert parse_complex(" 1 + 1i ") == 1 + 1j
    assert parse_complex("2j") == 2j


def test_parse_complex_rejections():
    for bad in ("", "abc", "1+", "inf", "nan+1i", "1+2i+3i"):
        with pytest.raises(UsageError):
            parse_complex(bad)


# ------------------------------------------------------------------- ratio


def test_ratio_analytic_json(capsys):
    code, out, _ = run_cli(["ratio", "--alpha-i", "1", "--alpha-f", "0.5",
                            "--nth", "1.62", "--tau", "0.3"], capsys)
    assert code == 0
    rec = json.loads(out)
    jsonschema.validate(rec, load_schema("result_record.schema.json"))
    assert rec["engine"] == "analytic"
    assert rec["log_ratio"] == pytest.approx(rec["predicted_log_ratio"], abs=1e-10)
    assert rec["log_upsilon"] == pytest.approx(
        rec["beta"] * rec["heat"] + rec["log_ratio"], abs=1e-12)
    assert rec["mc_point"] is None
    assert rec["dim"] is None


def test_ratio_fock_engine_agrees(capsys):
    args = ["--alpha-i", "1+0.5i", "--alpha-f", "0.8", "--nth", "1.0",
            "--tau", "0.7"]
    code, out, _ = run_cli(["ratio", *args], capsys)
    fast = json.loads(out)
    code2, out2, _ = run_cli(["ratio", *args, "--engine", "fock", "--dim", "40"],
                             capsys)
    slow = json.loads(out2)
    assert code == code2 == 0
    jsonschema.validate(slow, load_schema("result_record.schema.json"))
    assert slow["dim"] == 40
    assert slow["p_fwd"] == pytest.approx(fast["p_fwd"], rel=1e-6)
    assert slow["p_bwd"] == pytest.approx(fast["p_bwd"], rel=1e-6)


def test_ratio_montecarlo_engine(capsys):
    code, out, _ = run_cli(["ratio", "--alpha-i", "1", "--alpha-f", "0.5",
                            "--nth", "1.0", "--tau", "0.5",
                            "--engine", "montecarlo", "--samples", "2000",
                            "--seed", "5"], capsys)
    assert code == 0
    rec = json.loads(out)
    jsonschema.validate(rec, load_schema("result_record.schema.json"))
    assert rec["mc_point"] is not None
    assert rec["mc_std_error"] > 0.0
    assert rec["mc_ci_low"] <= rec["mc_point"] <= rec["mc_ci_high"]
    assert rec["mc_samples"] == 2000
    assert rec["mc_seed"] == 5


def test_ratio_bath_flags_are_exclusive(capsys):
    base = ["ratio", "--alpha-i", "1", "--alpha-f", "1", "--tau", "0.5"]
    code, _, err = run_cli(base + ["--nth", "1.0", "--beta", "0.5"], capsys)
    assert code == 2
    assert "exactly one" in err
    code, _, err = run_cli(base, capsys)
    assert code == 2


def test_ratio_rejects_bad_domains(capsys):
    code, _, err = run_cli(["ratio", "--alpha-i", "1", "--alpha-f", "1",
                            "--nth", "-1", "--tau", "0.5"], capsys)
    assert code == 2
    code, _, err = run_cli(["ratio", "--alpha-i", "1", "--alpha-f", "1",
                            "--nth", "1", "--tau", "1.5"], capsys)
    assert code == 2
    code, _, _ = run_cli(["ratio", "--alpha-i", "not-a-number", "--alpha-f", "1",
                          "--nth", "1", "--tau", "0.5"], capsys)
    assert code == 2


def test_ratio_requires_tau(capsys):
    code, _, _ = run_cli(["ratio", "--alpha-i", "1", "--alpha-f", "1",
                          "--nth", "1"], capsys)
    assert code == 2


# ------------------------------------------------------------------ sweeps


def fig3_config(tmp_path, **overrides):
    cfg = {
        "amplitudes_i": ["1", "0.5i"],
        "amplitudes_f": ["0.8"],
        "nth_list": [1.0],
        "mc_samples": 500,
        "base_seed": 77,
        "output_path": str(tmp_path / "grid.csv"),
    }
    cfg.update(overrides)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg), encoding="utf-8")
    return path


def test_sweep_fig3_config_grid(tmp_path, capsys):
    cfg = fig3_config(tmp_path)
    code, out, _ = run_cli(["sweep-fig3", "--config", str(cfg)], capsys)
    assert code == 0
    assert "2 rows, 0 failed" in out
    rows = read_rows(tmp_path / "grid.csv")
    assert rows[0] == FIG3_HEADER
    assert len(rows) == 3
    for row in rows[1:]:
        rec = dict(zip(FIG3_HEADER, row))
        assert rec["status"] == "ok"
        assert float(rec["analytic_log_ratio"]) == pytest.approx(
            float(rec["predicted_log_ratio"]), abs=1e-10)
        # default mapping: n_th = 1.0 is not the hot-bath special case
        assert float(rec["tau"]) == 0.3
        assert rec["mc_point"] != ""
        assert int(rec["mc_samples"]) == 500


def test_sweep_fig3_is_byte_deterministic(tmp_path, capsys):
    cfg = fig3_config(tmp_path)
    run_cli(["sweep-fig3", "--config", str(cfg),
             "--output", str(tmp_path / "a.csv")], capsys)
    run_cli(["sweep-fig3", "--config", str(cfg),
             "--output", str(tmp_path / "b.csv")], capsys)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_sweep_fig3_skip_mc(tmp_path, capsys):
    cfg = fig3_config(tmp_path)
    code, _, _ = run_cli(["sweep-fig3", "--config", str(cfg), "--skip-mc"], capsys)
    assert code == 0
    for row in read_rows(tmp_path / "grid.csv")[1:]:
        rec = dict(zip(FIG3_HEADER, row))
        assert rec["mc_point"] == ""
        assert rec["mc_seed"] == ""
        assert rec["status"] == "ok"


def test_sweep_fig3_explicit_tau_overrides_mapping(tmp_path, capsys):
    cfg = fig3_config(tmp_path, nth_list=[1.62])
    code, _, _ = run_cli(["sweep-fig3", "--config", str(cfg), "--skip-mc",
                          "--tau", "0.5"], capsys)
    assert code == 0
    taus = {row[7] for row in read_rows(tmp_path / "grid.csv")[1:]}
    assert taus == {"0.5"}


def test_sweep_fig3_hot_bath_tau_mapping(tmp_path, capsys):
    cfg = fig3_config(tmp_path, nth_list=[1.62, 2.4])
    run_cli(["sweep-fig3", "--config", str(cfg), "--skip-mc"], capsys)
    by_nth = {row[5]: row[7] for row in read_rows(tmp_path / "grid.csv")[1:]}
    assert by_nth["1.62"] == "0.15"
    assert by_nth["2.4"] == "0.3"


def test_sweep_fig3_rejects_unknown_config_key(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"amplitudes": ["1"]}), encoding="utf-8")
    code, _, err = run_cli(["sweep-fig3", "--config", str(path)], capsys)
    assert code == 2
    assert "unknown config keys" in err


def test_sweep_fig3_rejects_bad_values(tmp_path, capsys):
    cfg = fig3_config(tmp_path, nth_list=[-2.0])
    code, _, err = run_cli(["sweep-fig3", "--config", str(cfg)], capsys)
    assert code == 2
    assert "n_th" in err


def test_sweep_upsilon_default_grid(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("MICROREV_OUTPUT_DIR", str(tmp_path))
    code, out, _ = run_cli(["sweep-upsilon"], capsys)
    assert code == 0
    rows = read_rows(tmp_path / "upsilon.csv")
    assert rows[0] == UPSILON_HEADER
    assert len(rows) == 1 + 6 * 6 * 9
    for row in rows[1:]:
        rec = dict(zip(UPSILON_HEADER, row))
        beta = float(rec["beta"])
        tot = float(rec["alpha_sq_tot"])
        if float(rec["delta_alpha_sq"]) == 0.0:
            # equal amplitudes isolate the cosh term exactly
            expected = (math.cosh(beta) - 1.0) * tot
            assert float(rec["log_upsilon"]) == pytest.approx(expected, rel=1e-9)
        if abs(beta - 0.01) < 1e-12:
            per_tot = float(rec["log_upsilon_per_alpha_sq_tot"])
            assert per_tot == pytest.approx(float(rec["half_beta_sq"]), rel=0.01)


def test_sweep_upsilon_is_deterministic(tmp_path, capsys):
    run_cli(["sweep-upsilon", "--output", str(tmp_path / "a.csv")], capsys)
    run_cli(["sweep-upsilon", "--output", str(tmp_path / "b.csv")], capsys)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


# ------------------------------------------------------------ oracle-check


def test_oracle_check_passes(tmp_path, capsys):
    report_path = tmp_path / "report.json"
    code, out, _ = run_cli(["oracle-check", "--dim", "40",
                            "--output", str(report_path)], capsys)
    assert code == 0
    report = json.loads(out)
    jsonschema.validate(report, load_schema("oracle_report.schema.json"))
    assert report["passed"] is True
    assert {c["name"] for c in report["checks"]} == {
        "unitarity", "energy_conservation", "fixed_point",
        "gaussian_equivalence", "general_ratio"}
    assert all(c["passed"] for c in report["checks"])
    assert json.loads(report_path.read_text(encoding="utf-8")) == report


def test_oracle_check_starved_cutoff_fails_structurally(capsys):
    code, out, _ = run_cli(["oracle-check", "--dim", "4"], capsys)
    assert code == 1
    report = json.loads(out)
    jsonschema.validate(report, load_schema("oracle_report.schema.json"))
    assert report["passed"] is False
    failures = {c["name"]: c for c in report["checks"] if not c["passed"]}
    assert "gaussian_equivalence" in failures or "general_ratio" in failures
    errors = " ".join(str(c["error"]) for c in failures.values())
    assert "TruncationTooSmall" in errors or "DomainError" in errors


def test_oracle_check_tolerance_override(capsys):
    code, out, _ = run_cli(["oracle-check", "--dim", "24",
                            "--tolerance", "1e-20"], capsys)
    assert code == 1
    report = json.loads(out)
    assert report["tolerance_override"] == 1e-20
    assert any(not c["passed"] for c in report["checks"])


def test_oracle_check_rejects_tiny_dim(capsys):
    code, _, err = run_cli(["oracle-check", "--dim", "1"], capsys)
    assert code == 2
    assert "--dim" in err


# -------------------------------------------------------------- experiment


def test_experiment_outputs(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("MICROREV_OUTPUT_DIR", str(tmp_path))
    code, out, _ = run_cli(["experiment", "--alpha-i", "2", "--alpha-f", "1.5",
                            "--nth", "1.62", "--tau", "0.15",
                            "--samples", "5000", "--seed", "20260814",
                            "--output-prefix", "exp"], capsys)
    assert code == 0
    summary = json.loads(out)
    jsonschema.validate(summary, load_schema("experiment_summary.schema.json"))
    assert summary["within_4_std_error"] is True
    assert summary["n_samples"] == 5000
    assert (tmp_path / "exp.json").read_text(encoding="utf-8") == out
    rows = read_rows(tmp_path / "exp.csv")
    assert rows[0] == EXPERIMENT_HEADER
    directions = [row[0] for row in rows[1:]]
    assert directions == ["forward", "backward"]
    fwd = dict(zip(EXPERIMENT_HEADER, rows[1]))
    assert float(fwd["density"]) == summary["p_fwd_density"]
    assert float(fwd["variance_fit"]) == summary["forward_fit"]["variance"]


def test_experiment_is_byte_deterministic(tmp_path, capsys):
    args = ["experiment", "--alpha-i", "1", "--alpha-f", "0.5",
            "--nth", "1.0", "--tau", "0.5", "--samples", "1000", "--seed", "3"]
    run_cli(args + ["--output-prefix", str(tmp_path / "a")], capsys)
    run_cli(args + ["--output-prefix", str(tmp_path / "b")], capsys)
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_experiment_tiny_run_still_works(tmp_path, capsys):
    code, out, _ = run_cli(["experiment", "--alpha-i", "0.5", "--alpha-f", "0.5",
                            "--nth", "1.0", "--tau", "0.5", "--samples", "10",
                            "--seed", "1",
                            "--output-prefix", str(tmp_path / "tiny")], capsys)
    assert code == 0
    summary = json.loads(out)
    assert summary["resample_size"] == 10  # clamped to the dataset size


def test_output_dir_env_var(tmp_path, capsys, monkeypatch):
    target = tmp_path / "nested" / "outputs"
    monkeypatch.setenv("MICROREV_OUTPUT_DIR", str(target))
    cfg = fig3_config(tmp_path, output_path="rel.csv")
    code, _, _ = run_cli(["sweep-fig3", "--config", str(cfg), "--skip-mc"], capsys)
    assert code == 0
    assert (target / "rel.csv").exists()
