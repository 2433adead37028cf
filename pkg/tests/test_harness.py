"""Experiment harness: metrics, suite validation, pipeline determinism."""

import json

import numpy as np
import pytest

from qdrbench import cli
from qdrbench.errors import SuiteParseError, UsageError
from qdrbench.harness import (
    CSV_HEADER,
    ExperimentConfig,
    metrics,
    parse_suite,
    run_experiment,
    run_single,
    run_suite,
)


def test_metrics_arithmetic():
    rep = metrics([1, 1, 0, 0, 1], [1, 0, 0, 1, 1])
    assert rep.accuracy == pytest.approx(3 / 5)
    assert rep.precision == pytest.approx(2 / 3)
    assert rep.recall == pytest.approx(2 / 3)
    assert rep.f1 == pytest.approx(2 / 3)


def test_metrics_zero_division_convention():
    rep = metrics([0, 0, 0], [0, 0, 1])  # no positive predictions
    assert rep.precision == 0.0
    assert rep.f1 == 0.0
    rep = metrics([1, 1], [0, 0])  # no true positives at all
    assert rep.recall == 0.0
    rep = metrics([0, 0], [0, 0])
    assert rep.accuracy == 1.0 and rep.f1 == 0.0


def test_metrics_validation():
    with pytest.raises(UsageError):
        metrics([], [])
    with pytest.raises(UsageError):
        metrics([1, 0], [1])
    with pytest.raises(UsageError):
        metrics([1, 2], [1, 0])


def _qnn_experiment(**overrides):
    d = {
        "dataset": {"kind": "linear", "n_samples": 40, "class_sep": 3.0},
        "reduction": {"method": "PCA", "target_dim": 8},
        "model": {"type": "QNN", "ansatz": "U_TTN",
                  "embedding": {"kind": "Amplitude"}, "layers": 1},
        "training": {"iterations": 5, "batch_size": 8},
        "repeats": 2,
    }
    d.update(overrides)
    return d


def test_unknown_fields_rejected_by_name():
    with pytest.raises(SuiteParseError, match="colour"):
        ExperimentConfig.from_dict(_qnn_experiment(colour="blue"))
    bad = _qnn_experiment()
    bad["model"]["warp"] = 9
    with pytest.raises(SuiteParseError, match="warp"):
        ExperimentConfig.from_dict(bad)
    bad = _qnn_experiment()
    bad["dataset"]["n_rows"] = 10
    with pytest.raises(SuiteParseError, match="n_rows"):
        ExperimentConfig.from_dict(bad)


def test_width_invariants_named():
    bad = _qnn_experiment(reduction={"method": "PCA", "target_dim": 9})
    with pytest.raises(SuiteParseError, match="QNN width"):
        ExperimentConfig.from_dict(bad)
    bad = _qnn_experiment(
        reduction={"method": "PCA", "target_dim": 3},
        model={"type": "QSVC", "embedding": {"kind": "AngleY"}},
    )
    with pytest.raises(SuiteParseError, match="QSVC width"):
        ExperimentConfig.from_dict(bad)
    # widths come from the raw feature count when there is no reduction
    ok = _qnn_experiment(reduction=None)
    assert ExperimentConfig.from_dict(ok).width() == 16


def test_misc_config_validation():
    with pytest.raises(SuiteParseError, match="dataset"):
        ExperimentConfig.from_dict({"model": {"type": "CNN"}})
    with pytest.raises(SuiteParseError, match="kind"):
        ExperimentConfig.from_dict(_qnn_experiment(dataset={"kind": "audio"}))
    with pytest.raises(SuiteParseError, match="model type"):
        ExperimentConfig.from_dict(_qnn_experiment(model={"type": "GAN"}))
    with pytest.raises(SuiteParseError, match="repeats"):
        ExperimentConfig.from_dict(_qnn_experiment(repeats=0))
    with pytest.raises(SuiteParseError, match="reduction"):
        ExperimentConfig.from_dict(
            _qnn_experiment(reduction={"method": "LDA", "target_dim": 8})
        )


def test_run_single_deterministic():
    cfg = ExperimentConfig.from_dict(_qnn_experiment())
    a = run_single(cfg, 5)
    b = run_single(cfg, 5)
    assert (a.accuracy, a.precision, a.recall, a.f1) == \
        (b.accuracy, b.precision, b.recall, b.f1)


def test_run_experiment_rows_and_seeds():
    cfg = ExperimentConfig.from_dict(_qnn_experiment())
    rows = run_experiment(cfg, 100)
    assert len(rows) == 3  # two runs plus the mean
    assert [r["run"] for r in rows] == ["0", "1", "mean"]
    assert [r["seed"] for r in rows] == [100, 101, 100]
    accs = [float(r["accuracy"]) for r in rows]
    assert accs[2] == pytest.approx(np.mean(accs[:2]), abs=1e-6)
    assert list(rows[0]) == CSV_HEADER


def _write_suite(tmp_path, experiments):
    path = tmp_path / "suite.json"
    path.write_text(json.dumps({"schema_version": 1,
                                "experiments": experiments}))
    return path


def test_suite_parse_errors(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(SuiteParseError, match="invalid JSON"):
        parse_suite(path)
    path.write_text(json.dumps({"schema_version": 2, "experiments": []}))
    with pytest.raises(SuiteParseError, match="schema_version"):
        parse_suite(path)
    path.write_text(json.dumps({"schema_version": 1, "experiments": [],
                                "extra": 1}))
    with pytest.raises(SuiteParseError, match="extra"):
        parse_suite(path)


def test_run_suite_outputs_and_determinism(tmp_path):
    suite = _write_suite(tmp_path, [_qnn_experiment()])
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    run_suite(suite, out_a, 7)
    run_suite(suite, out_b, 7)
    for name in ("results.csv", "summary.csv", "results.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    lines = (out_a / "results.csv").read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 3  # header + 2 runs
    summary = (out_a / "summary.csv").read_text().splitlines()
    assert len(summary) == 2 and ",mean," in summary[1]
    payload = json.loads((out_a / "results.json").read_text())
    assert payload["master_seed"] == 7
    assert len(payload["results"]) == 2 and len(payload["summary"]) == 1


def test_empty_suite_writes_header_only(tmp_path):
    suite = _write_suite(tmp_path, [])
    out = tmp_path / "empty"
    run_suite(suite, out, 0)
    assert (out / "results.csv").read_text() == ",".join(CSV_HEADER) + "\n"


def test_repeats_override_and_parallel(tmp_path):
    suite = _write_suite(tmp_path, [_qnn_experiment(), _qnn_experiment()])
    out_seq = tmp_path / "seq"
    out_par = tmp_path / "par"
    run_suite(suite, out_seq, 3, repeats_override=1)
    run_suite(suite, out_par, 3, repeats_override=1, parallel=2)
    assert (out_seq / "results.csv").read_bytes() == \
        (out_par / "results.csv").read_bytes()
    assert len((out_seq / "results.csv").read_text().splitlines()) == 3


def test_cli_run_and_errors(tmp_path, capsys):
    suite = _write_suite(tmp_path, [_qnn_experiment()])
    out = tmp_path / "cli-out"
    assert cli.main(["run", "--suite", str(suite), "--out", str(out),
                     "--seed", "1"]) == 0
    assert (out / "results.csv").exists()
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    assert cli.main(["run", "--suite", str(bad), "--out", str(out),
                     "--seed", "1"]) == 1
    assert "error:" in capsys.readouterr().err


def test_cli_gen_and_reduce(tmp_path):
    csv_path = tmp_path / "d.csv"
    assert cli.main(["gen-dataset", "--kind", "image4x4", "--out",
                     str(csv_path), "--seed", "2", "--samples", "40"]) == 0
    out_path = tmp_path / "r.csv"
    assert cli.main(["reduce", "--method", "pca", "--dim", "4", "--in",
                     str(csv_path), "--out", str(out_path)]) == 0
    header = out_path.read_text().splitlines()[0]
    assert header == "f0,f1,f2,f3,label"
