import csv
import json
from pathlib import Path

import pytest

from sparsescreen.cli import main

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    rc = main(["synth", "--n", "47", "--p", "120", "--s", "3", "--m", "3", "--n-null", "1",
               "--constant-columns", "1", "--seed", "2", "--out", str(out)])
    assert rc == 0
    return out


def _data_args(d):
    return ["--predictors", str(d / "predictors.csv"), "--responses", str(d / "responses.csv")]


def _read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(ln for ln in fh if not ln.startswith("#")))


def test_synth_files(synth_dir):
    for name in ("predictors.csv", "responses.csv", "metadata.csv", "truth.csv"):
        assert (synth_dir / name).read_text().startswith("# sparsescreen")
    rows = _read_csv(synth_dir / "responses.csv")
    assert len(rows) == 47
    assert all(float(v) >= 0 for r in rows for k, v in r.items() if k != "unit")


def test_fit_above_lambda_max(synth_dir, capsys):
    rc = main(["fit", *_data_args(synth_dir), "--response", "y1", "--lambda", "1e6"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "n_nonzero\t0" in out
    assert "kkt_max_violation" in out


def test_fit_unknown_response(synth_dir):
    assert main(["fit", *_data_args(synth_dir), "--response", "nope", "--lambda", "0.1"]) == 2


def test_fit_missing_file(tmp_path):
    args = ["fit", "--predictors", str(tmp_path / "x.csv"), "--responses", str(tmp_path / "y.csv"),
            "--response", "a", "--lambda", "0.1"]
    assert main(args) == 2


def test_fit_non_convergence_exit_1_with_report(synth_dir, tmp_path):
    out = tmp_path / "fit"
    rc = main(["fit", *_data_args(synth_dir), "--response", "y1", "--lambda", "0.01",
               "--max-sweeps", "1", "--out", str(out)])
    assert rc == 1
    text = (out / "fit.tsv").read_text()
    assert "converged\tfalse" in text


def test_bad_arguments_exit_2():
    assert main(["fit"]) == 2
    assert main(["bogus"]) == 2


def test_cv_writes_curve(synth_dir, tmp_path, capsys):
    out = tmp_path / "cv"
    args = ["cv", *_data_args(synth_dir), "--response", "y2", "--n-lambda", "25", "--out", str(out)]
    assert main(args) == 0
    printed = capsys.readouterr().out
    first = (out / "cv_curve.tsv").read_text()
    rows = [ln for ln in first.splitlines() if not ln.startswith("#")]
    assert rows[0] == "lambda\tmean_error\tstd_error"
    assert len(rows) - 1 == 25
    vals = dict(line.split("\t") for line in printed.strip().splitlines())
    assert float(vals["lambda_1se"]) >= float(vals["lambda_min"])
    # refuses to overwrite without the flag, identical when re-run with it
    assert main(args) == 2
    assert main(args + ["--overwrite"]) == 0
    assert (out / "cv_curve.tsv").read_text() == first


def test_screen_and_analyze(synth_dir, tmp_path):
    out = tmp_path / "screen"
    args = ["screen", *_data_args(synth_dir), "--metadata", str(synth_dir / "metadata.csv"),
            "--n-lambda", "30", "--parallelism", "2", "--out", str(out)]
    assert main(args) == 0
    report = _read_csv(out / "report.csv")
    counts = _read_csv(out / "predictor_counts.csv")
    assert len(report) == 4
    assert sum(int(r["n_nonzero"]) for r in report) == sum(int(r["count"]) for r in counts)
    assert counts[-1] == {"predictor": "x121", "count": "0"}  # the constant column
    doc = json.loads((out / "report.json").read_text())
    assert doc["config"]["n_lambda"] == 30 and doc["config"]["rule"] == "min"
    assert doc["totals"]["sum_n_nonzero"] == doc["totals"]["sum_predictor_counts"]
    assert ["x121", "constant"] in doc["excluded_predictors"]
    for r in doc["responses"]:
        assert len(r["coefficients"]) == r["n_nonzero"]

    an = tmp_path / "analyze"
    assert main(["analyze", str(out / "report.csv"), "--out", str(an)]) == 0
    summary = json.loads((an / "regression_summary.json").read_text())
    assert summary["n"] == 4


def test_screen_requires_metadata(synth_dir, tmp_path):
    assert main(["screen", *_data_args(synth_dir), "--out", str(tmp_path)]) == 2


def test_analyze_table1(tmp_path):
    assert main(["analyze", str(FIXTURES / "table1.csv"), "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "regression_summary.json").read_text())
    assert summary["slope"] > 0 and summary["p_value"] < 0.05
    fig = [ln for ln in (tmp_path / "figure1.tsv").read_text().splitlines() if not ln.startswith("#")]
    assert fig[0] == "local_factor\tn_nonzero"
    assert fig[1:4] == ["1\t0", "1\t0", "1\t2"]
    assert len(fig) == 69


def test_analyze_degenerate_input(tmp_path):
    path = tmp_path / "pairs.csv"
    path.write_text("response,local_factor,n_nonzero\na,1,0\nb,5,8\n")
    assert main(["analyze", str(path), "--out", str(tmp_path / "o")]) == 2
