import csv
import json
import subprocess
import sys

import pytest

from cutreg import cli, cutting
from cutreg.metrics import CSV_HEADER

SMALL = (
    "num_qubits = 4\n"
    "num_partitions = 2\n"
    "num_layers = 1\n"
    "epochs = 2\n"
    "batch_size = 20\n"
    "n_train = 20\n"
    "n_val = 10\n"
    "n_test = 10\n"
    "num_samples = 400\n"
)


@pytest.fixture
def small_cfg(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(SMALL)
    return path


@pytest.fixture(autouse=True)
def _reset_sabotage():
    yield
    cutting._SABOTAGE_SCALE = 1.0


def run_cli(*argv):
    return cli.main(list(argv))


def test_usage_errors_exit_1(capsys):
    assert run_cli() == 1
    assert run_cli("no-such-command") == 1
    assert run_cli("train", "--mode", "bogus") == 1
    capsys.readouterr()


def test_missing_config_file_exits_1(tmp_path, capsys):
    assert run_cli("overhead", "--config", str(tmp_path / "absent.cfg")) == 1
    assert "error" in capsys.readouterr().err


def test_bad_config_key_exits_1(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("epocs = 5\n")
    assert run_cli("train", "--config", str(path)) == 1
    assert "epocs" in capsys.readouterr().err


def test_generate_data_writes_csv_and_metadata(small_cfg, tmp_path, capsys):
    out = tmp_path / "out"
    assert run_cli("generate-data", "--config", str(small_cfg), "--out", str(out)) == 0
    rows = list(csv.reader(open(out / "dataset.csv")))
    assert rows[0] == [f"f{j}" for j in range(4)] + ["y", "split"]
    assert len(rows) == 41
    meta = json.loads((out / "dataset.meta.json").read_text())
    assert meta["split_sizes"] == {"train": 20, "val": 10, "test": 10}
    capsys.readouterr()


def test_overhead_reports_known_values(capsys):
    assert run_cli("overhead", "--alphas", "1.5707963267948966,1.5707963267948966,"
                   "1.5707963267948966,1.5707963267948966") == 0
    out = capsys.readouterr().out
    assert "s_total    = 6561" in out
    assert "kappa      = 81" in out


def test_overhead_rejects_bad_alphas(capsys):
    assert run_cli("overhead", "--alphas", "0.1,oops") == 1
    capsys.readouterr()


def test_cut_check_passes(small_cfg, capsys):
    assert run_cli("cut-check", "--config", str(small_cfg), "--trials", "5") == 0
    out = capsys.readouterr().out
    assert "PASS" in out


def test_cut_check_sabotage_is_detected(tmp_path, capsys):
    # needs a cut that is not the last gate: a corrupted coefficient is
    # invisible to a diagonal observable measured straight after the cut
    cfg = tmp_path / "deep.cfg"
    cfg.write_text("num_qubits = 4\nnum_partitions = 2\nnum_layers = 2\n"
                   "num_samples = 400\n")
    assert run_cli("cut-check", "--config", str(cfg), "--trials", "5",
                   "--sabotage") == 2
    out = capsys.readouterr().out
    assert "FAIL" in out


def test_train_writes_metrics_params_summary(small_cfg, tmp_path, capsys):
    out = tmp_path / "run"
    assert run_cli("train", "--config", str(small_cfg), "--out", str(out)) == 0
    lines = (out / "metrics.csv").read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 2 + 1  # header, one row per epoch, final row
    assert all(line.endswith(",0") for line in lines[1:])  # wallclock stays 0
    params = json.loads((out / "params.json").read_text())
    assert len(params["theta"]) == 8
    assert len(params["alpha"]) == 1
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary) >= {"initial_test_mse", "final_test_mse",
                            "initial_s_total", "final_s_total"}
    capsys.readouterr()

    result = run_cli("evaluate", "--config", str(small_cfg), "--out", str(out),
                     "--params", str(out / "params.json"))
    assert result == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["mode"] == "full"
    assert payload["test_mse"] >= 0


def test_train_resource_cap_exits_3(small_cfg, tmp_path, capsys):
    cfg = tmp_path / "capped.cfg"
    cfg.write_text(SMALL + "resource_cap = 2\nforward_mode = cut_exact\n")
    assert run_cli("train", "--config", str(cfg), "--out", str(tmp_path / "r")) == 3
    assert "resource cap" in capsys.readouterr().err


def test_train_reuses_existing_dataset(small_cfg, tmp_path, capsys):
    out = tmp_path / "shared"
    assert run_cli("generate-data", "--config", str(small_cfg), "--out", str(out)) == 0
    before = (out / "dataset.csv").read_bytes()
    assert run_cli("train", "--config", str(small_cfg), "--out", str(out)) == 0
    assert (out / "dataset.csv").read_bytes() == before
    capsys.readouterr()


def test_console_entry_point_subprocess(small_cfg, tmp_path):
    out = tmp_path / "sub"
    proc = subprocess.run(
        [sys.executable, "-m", "cutreg.cli", "train", "--config", str(small_cfg),
         "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "final test MSE" in proc.stdout
