import json
import re
import subprocess
import sys

import numpy as np
import pytest

from ggmfdr.cli import main
from ggmfdr.dataio import read_data_csv, write_data_csv
from ggmfdr.errors import IngestionError, ParameterError
from ggmfdr.experiments import ExperimentConfig, aggregate, calibrate, simulate
from ggmfdr.graphs import band_graph, make_rng, sample_mvn


@pytest.fixture(scope="module")
def band_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "band.csv"
    write_data_csv(path, sample_mvn(band_graph(50), 100, make_rng(42, 1)))
    return path


def test_estimate_smoke(band_csv, capsys):
    assert main(["estimate", str(band_csv), "--alpha", "0.1"]) == 0
    out, err = capsys.readouterr()
    doc = json.loads(out)
    assert doc["t_hat"] > 0 and len(doc["edges"]) > 0
    assert doc["p"] == 50 and doc["n"] == 100 and 0 <= doc["delta"] <= 2
    assert all(1 <= i < j <= 50 for i, j, _ in doc["edges"])
    assert re.search(r"p=50 n=100 delta_hat=\S+ t_hat=\S+.* edges=\d+", err)


def test_estimate_output_file(band_csv, tmp_path, capsys):
    out_path = tmp_path / "sel.json"
    assert main(["estimate", str(band_csv), "--solver", "dantzig", "--delta", "1.0",
                 "--output", str(out_path)]) == 0
    summary = capsys.readouterr().out
    assert "delta=1" in summary and "edges=" in summary
    assert json.loads(out_path.read_text())["solver"] == "dantzig"


def test_estimate_header_flag(band_csv, tmp_path, capsys):
    headed = tmp_path / "headed.csv"
    headed.write_text(",".join(f"v{k}" for k in range(50)) + "\n" + band_csv.read_text())
    main(["estimate", str(band_csv), "--delta", "1.0"])
    plain = capsys.readouterr().out
    main(["estimate", str(headed), "--header", "--delta", "1.0"])
    assert capsys.readouterr().out == plain
    assert main(["estimate", str(headed), "--delta", "1.0"]) == 2


def test_estimate_one_row_exits_2(tmp_path, capsys):
    path = tmp_path / "one.csv"
    path.write_text("1,2,3\n")
    assert main(["estimate", str(path)]) == 2
    assert "at least 2" in capsys.readouterr().err


def test_estimate_parse_error_names_row_and_column(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("1,2,3\n4,x,6\n7,8,9\n")
    assert main(["estimate", str(path)]) == 2
    assert "row 2, column 2" in capsys.readouterr().err


def test_estimate_constant_column_exits_2(tmp_path, capsys):
    path = tmp_path / "const.csv"
    path.write_text("1,5,3\n4,5,6\n7,5,8\n2,5,1\n")
    assert main(["estimate", str(path)]) == 2
    assert "column 2 is constant" in capsys.readouterr().err


def test_missing_file_exits_2(tmp_path):
    assert main(["estimate", str(tmp_path / "absent.csv")]) == 2


def test_numeric_failure_exits_3(tmp_path, capsys):
    # p > n with delta = 0 interpolates: residuals vanish
    path = tmp_path / "wide.csv"
    write_data_csv(path, sample_mvn(band_graph(30), 10, make_rng(0, 1)))
    with pytest.warns(RuntimeWarning):
        assert main(["estimate", str(path), "--delta", "0"]) == 3
    assert "numeric error" in capsys.readouterr().err


def test_tune_command(band_csv, capsys):
    assert main(["tune", str(band_csv), "--grid-n", "5"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["N"] == 5 and len(doc["losses"]) == 11
    assert doc["delta_hat"] == doc["j_hat"] / 5


def strip_runtime(text):
    return re.sub(r'"runtime_ms": [0-9.e+-]+', '"runtime_ms": 0', text)


def test_simulate_deterministic(capsys):
    argv = ["simulate", "--family", "band", "--p", "20", "--reps", "1", "--seed", "9"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert strip_runtime(capsys.readouterr().out) == strip_runtime(first)
    doc = json.loads(first)
    assert doc["config"]["base_seed"] == 9 and doc["records"][0]["seed"] == 9


def test_simulate_csv_and_jobs_independent(tmp_path):
    cfg = dict(family="er", p=20, n=80, replications=3, base_seed=4)
    serial = simulate(ExperimentConfig(**cfg), jobs=1)
    parallel = simulate(ExperimentConfig(**cfg), jobs=2)
    drop = lambda recs: [{k: v for k, v in r.items() if k != "runtime_ms"} for r in recs]
    assert drop(serial.records) == drop(parallel.records)
    assert [r["model_seed"] for r in serial.records] == [4, 5, 6]
    lines = serial.to_csv().splitlines()
    assert lines[0].startswith("family,p,n,alpha,solver") and len(lines) == 4


def test_fix_model_freezes_er_graph():
    cfg = ExperimentConfig(family="er", p=20, n=80, replications=2, base_seed=4, fix_model=True)
    assert {r["model_seed"] for r in simulate(cfg, jobs=1).records} == {4}


def test_aggregates_recomputable():
    rep = simulate(ExperimentConfig(p=20, replications=4), jobs=1)
    again = aggregate(rep.records)
    for key, value in rep.aggregates.items():
        assert abs(value - again[key]) < 1e-12
    assert abs(rep.aggregates["mean_fdp"] - np.mean([r["fdp"] for r in rep.records])) < 1e-12


def test_replication_rerun_from_report():
    rep = simulate(ExperimentConfig(p=20, replications=3, base_seed=10), jobs=1)
    single = simulate(ExperimentConfig(p=20, replications=1, base_seed=rep.records[2]["seed"]), jobs=1)
    assert single.records[0]["t_hat"] == rep.records[2]["t_hat"]
    assert single.records[0]["fdp"] == rep.records[2]["fdp"]


def test_config_validation():
    with pytest.raises(ParameterError):
        calibrate(ExperimentConfig(replications=0))
    with pytest.raises(ParameterError):
        ExperimentConfig(alpha=1.0).validate()
    with pytest.raises(ParameterError):
        ExperimentConfig(family="file").validate()
    assert main(["calibrate", "--reps", "0"]) == 2


def test_calibrate_large_n():
    rep = calibrate(ExperimentConfig(family="band", p=10, n=10_000, replications=50), jobs=1)
    assert 0.97 <= rep["sd"] <= 1.03
    assert rep["count"] == 50 * (45 - 17)


@pytest.mark.parametrize("seed", range(5))
def test_csv_round_trip_bit_identical(tmp_path, seed):
    data = make_rng(seed).standard_normal((7, 4)) * 10.0 ** make_rng(seed + 1).integers(-300, 300, 4)
    path = tmp_path / "x.csv"
    write_data_csv(path, data)
    assert np.array_equal(read_data_csv(path), data)


def test_ragged_csv(tmp_path):
    path = tmp_path / "rag.csv"
    path.write_text("1,2\n3,4,5\n")
    with pytest.raises(IngestionError, match="row 2"):
        read_data_csv(path)


def test_console_entry_point(band_csv):
    out = subprocess.run([sys.executable, "-m", "ggmfdr.cli", "estimate", str(band_csv),
                          "--delta", "1.5"], capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["delta"] == 1.5
