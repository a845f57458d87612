"""Command-line interface behavior and exit codes."""

import filecmp
import json

import pytest

from mmwhybrid.cli import run_cli


def small_args(tmp_path, name):
    out = tmp_path / name
    return ["sweep", "--set", "trials=2", "--set", "snr_grid_dB=-5,5",
            "--out", str(out)], out


def test_sweep_writes_csv_and_metadata(tmp_path, capsys):
    args, out = small_args(tmp_path, "run.csv")
    assert run_cli(args) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "snr_db,mode,mean_rate_bps_hz,std_err,trials"
    assert len(lines) == 1 + 2 * 3  # 2 SNRs x 3 modes
    meta = json.loads((tmp_path / "run.csv.meta.json").read_text())
    assert meta["config"]["trials"] == 2
    assert meta["seed"] == meta["config"]["seed"]
    assert "wrote" in capsys.readouterr().out


def test_sweep_on_shipped_preset(tmp_path):
    out = tmp_path / "fig2.csv"
    rc = run_cli(["sweep", "--config", "paper_fig2.cfg",
                  "--set", "trials=1", "--set", "snr_grid_dB=0",
                  "--set", "max_iterations=2", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 3  # one record per mode at the single SNR
    meta = json.loads((tmp_path / "fig2.csv.meta.json").read_text())
    assert meta["config"]["N_t"] == 32
    assert meta["config"]["N_RF"] == 4


def test_sweep_is_deterministic(tmp_path):
    args_a, out_a = small_args(tmp_path, "a.csv")
    args_b, out_b = small_args(tmp_path, "b.csv")
    assert run_cli(args_a + ["--seed", "7"]) == 0
    assert run_cli(args_b + ["--seed", "7"]) == 0
    assert filecmp.cmp(out_a, out_b, shallow=False)


def test_validate_config_accepts_default(capsys):
    assert run_cli(["validate-config"]) == 0
    assert "config OK" in capsys.readouterr().out


def test_validate_config_rejects_bad_constraint(capsys):
    assert run_cli(["validate-config", "--set", "N_RF=64"]) == 2
    assert "N_RF" in capsys.readouterr().err


def test_unknown_override_is_usage_error(capsys):
    assert run_cli(["validate-config", "--set", "bogus=1"]) == 2
    assert "bogus" in capsys.readouterr().err


def test_missing_config_file_is_usage_error(capsys):
    assert run_cli(["validate-config", "--config", "no_such_file.cfg"]) == 2
    assert "neither a file nor a shipped preset" in capsys.readouterr().err


def test_usage_error_exit_code(capsys):
    assert run_cli(["sweep"]) == 2  # --out is required
    capsys.readouterr()


def test_trial_prints_iterations_and_rates(capsys):
    rc = run_cli(["trial", "--set", "snr_grid_dB=0", "--set", "trials=1"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "mode=cs_estimated" in out
    assert "iteration 1" in out
    assert "mean rate" in out
    assert "mode=full_digital" in out


def test_seed_override_changes_output(tmp_path):
    args_a, out_a = small_args(tmp_path, "s1.csv")
    args_b, out_b = small_args(tmp_path, "s2.csv")
    assert run_cli(args_a + ["--seed", "1"]) == 0
    assert run_cli(args_b + ["--seed", "2"]) == 0
    assert out_a.read_text() != out_b.read_text()
