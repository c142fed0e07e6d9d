import json
from dataclasses import replace

import numpy as np
import pytest

from cvahedge.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from cvahedge.engine import ExperimentConfig, run_experiment
from cvahedge.reporting import metrics_header, read_metrics_csv, write_metrics_csv


@pytest.fixture(scope="module")
def small_run():
    return run_experiment(ExperimentConfig(n_paths=500, seed=9))


def test_base_grid_gives_201_rows_and_round_trips(small_run, tmp_path):
    path = write_metrics_csv(small_run, tmp_path / "m.csv")
    data = read_metrics_csv(path)
    assert list(data) == metrics_header()
    assert len(data["date"]) == 201
    np.testing.assert_array_equal(data["p1_mean_sw"], small_run.mean["p1"]["sw"])
    np.testing.assert_array_equal(data["p2_vol_pnl"], small_run.vol["p2"]["pnl"])


def test_single_path_single_step(tmp_path):
    res = run_experiment(ExperimentConfig(n_paths=1, steps_per_year=1))
    data = read_metrics_csv(write_metrics_csv(res, tmp_path / "m.csv"))
    assert len(data["date"]) == 2 and list(data) == metrics_header()


def test_cli_run_writes_outputs(tmp_path):
    out = tmp_path / "o"
    assert main(["--out", str(out), "run", "--preset", "fig1", "--seed", "42", "--paths", "300"]) == EXIT_OK
    for name in ("metrics.csv", "histogram.csv", "manifest.json", "summary.json"):
        assert (out / name).exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 42 and manifest["config"]["sim"]["paths"] == 300


def test_cli_run_is_reproducible(tmp_path):
    args = ["run", "--preset", "fig3", "--seed", "5", "--paths", "200", "--steps", "20"]
    main(["--out", str(tmp_path / "a"), *args])
    main(["--out", str(tmp_path / "b"), *args])
    assert (tmp_path / "a/metrics.csv").read_bytes() == (tmp_path / "b/metrics.csv").read_bytes()


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("CVAHEDGE_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["run", "--paths", "50", "--steps", "10", "--two-desk", "--event-log", "2"]) == EXIT_OK
    assert {"desk.csv", "events.csv"} <= {p.name for p in (tmp_path / "env").iterdir()}


def test_cli_smile_and_truncation(tmp_path):
    assert main(["--out", str(tmp_path), "smile", "--model", "merton", "--param", "xi",
                 "--values", "0.25,0.5,1,3,6"]) == EXIT_OK
    header = (tmp_path / "smile_xi.csv").read_text().splitlines()[0].split(",")
    assert header[0] == "strike" and len(header) == 6
    assert main(["--out", str(tmp_path), "truncation", "--tol", "1e-4"]) == EXIT_OK
    assert (tmp_path / "truncation.csv").read_text().startswith("sweep,value,price,delta")


def test_cli_price(capsys):
    assert main(["price", "--model", "bs", "--spot", "100"]) == EXIT_OK
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert float(row[1]) == pytest.approx(16.438643820765407, rel=1e-15)


@pytest.mark.parametrize("argv,code", [
    (["run", "--preset", "nope"], EXIT_USAGE),
    (["frobnicate"], EXIT_USAGE),
    (["run", "--config", "/nonexistent.yaml"], EXIT_IO),
    (["smile", "--model", "bs", "--param", "xi", "--values", "1"], EXIT_CONFIG),
])
def test_cli_exit_codes(argv, code, tmp_path):
    assert main(["--out", str(tmp_path), *argv]) == code


def test_cli_bad_config_file(tmp_path):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("model: bs\njump:\n  xi: 0.1\n")
    assert main(["--out", str(tmp_path), "run", "--config", str(cfg)]) == EXIT_CONFIG
