"""Command-line interface: exit codes, report structure, determinism,
environment overrides, and atomic output."""

import json
import os

import numpy as np
import pytest

from metacash.cli import KB_ENV_VAR, main

from conftest import write_csv


def run_cli(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse rejections exit directly
        code = exc.code
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_ndjson(path):
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


@pytest.fixture
def corpus(tmp_path):
    """Three small complete datasets plus a manifest."""
    rng = np.random.default_rng(17)
    rows_out = []
    for d in range(3):
        n = 36
        X = rng.normal(size=(n, 3)) + d * 0.3
        y = (X[:, 0] - 0.2 * X[:, 1] > d * 0.3).astype(int)
        if len(np.unique(y)) < 2:
            y[:3] = 1 - y[0]
        path = tmp_path / ("set%d.csv" % d)
        rows = [["%.5f" % X[i, 0], "%.5f" % X[i, 1], "%.5f" % X[i, 2],
                 "k%d" % y[i]] for i in range(n)]
        write_csv(path, ["f0", "f1", "f2", "target"], rows)
        rows_out.append(("set%d" % d, str(path), "target"))
    manifest = tmp_path / "manifest.csv"
    write_csv(manifest, ["id", "path", "target"], rows_out)
    return {"manifest": str(manifest),
            "dataset": rows_out[0][1],
            "tmp": tmp_path}


def build_args(corpus, kb_root, extra=()):
    return ["build-kb", corpus["manifest"], "--kb", kb_root,
            "--algorithms", "DECISION_TREE,LOGISTIC_REGRESSION",
            "--configs-per-algo", "5", "--metrics", "accuracy,f1",
            "--cv-k", "2", "--cv-repeats", "1", "--seed", "7",
            *extra]


@pytest.fixture
def built_kb(corpus, capsys):
    kb_root = str(corpus["tmp"] / "kb")
    code = main(build_args(corpus, kb_root))
    capsys.readouterr()
    assert code == 0
    return kb_root


# -- extract-mf ---------------------------------------------------------------


def test_extract_mf_report_shape(corpus, capsys, tmp_path):
    out = str(tmp_path / "mf.ndjson")
    code, stdout, _ = run_cli(["extract-mf", corpus["dataset"],
                               "--target", "target", "--seed", "3",
                               "--out", out], capsys)
    assert code == 0
    records = read_ndjson(out)
    assert records[0]["record"] == "run"
    assert records[0]["subcommand"] == "extract-mf"
    assert records[0]["config"]["seed"] == 3
    mf = records[1]
    assert mf["record"] == "meta_features"
    assert mf["values"]["n_instances"] == 36.0
    assert mf["values"]["n_classes"] == 2.0


def test_extract_mf_deterministic_bytes(corpus, capsys, tmp_path):
    # identical invocations produce identical report bytes
    out = str(tmp_path / "mf.ndjson")
    argv = ["extract-mf", corpus["dataset"], "--target", "target",
            "--seed", "7", "--out", out]
    assert run_cli(argv, capsys)[0] == 0
    with open(out, "rb") as f:
        first = f.read()
    assert run_cli(argv, capsys)[0] == 0
    with open(out, "rb") as f:
        assert f.read() == first


def test_missing_file_is_a_data_error(capsys):
    code, _, err = run_cli(["extract-mf", "/nope/missing.csv",
                            "--target", "y"], capsys)
    assert code == 2
    assert "missing.csv" in err


def test_unknown_flag_is_a_usage_error(corpus, capsys):
    code, _, _ = run_cli(["extract-mf", corpus["dataset"],
                          "--target", "target", "--frobnicate"], capsys)
    assert code == 1


def test_bad_target_is_a_data_error(corpus, capsys):
    code, _, err = run_cli(["extract-mf", corpus["dataset"],
                            "--target", "no-such-column"], capsys)
    assert code == 2
    assert err.startswith("data error:")


# -- tune ----------------------------------------------------------------------


def test_tune_random_budget_respected(corpus, capsys, tmp_path):
    out = str(tmp_path / "tune.ndjson")
    code, _, _ = run_cli(["tune", corpus["dataset"], "--target", "target",
                          "--algorithm", "DECISION_TREE",
                          "--strategy", "random", "--budget", "4",
                          "--cv-k", "2", "--seed", "5", "--out", out],
                         capsys)
    assert code == 0
    records = read_ndjson(out)
    result = records[1]
    assert result["record"] == "search_result"
    assert result["strategy"] == "random"
    assert result["evaluations_used"] == 4
    assert len(result["history"]) == 4
    assert 0.0 <= result["best_score"] <= 1.0
    assert result["algorithm"] == "DECISION_TREE"


def test_tune_rejects_unknown_algorithm(corpus, capsys):
    code, _, _ = run_cli(["tune", corpus["dataset"], "--target", "target",
                          "--algorithm", "NOT_AN_ALGO"], capsys)
    assert code == 1


# -- build-kb --------------------------------------------------------------------


def test_build_kb_counts_and_summary(corpus, capsys, tmp_path):
    kb_root = str(tmp_path / "kb")
    out = str(tmp_path / "build.ndjson")
    code, _, _ = run_cli(build_args(corpus, kb_root, ["--out", out]), capsys)
    assert code == 0
    summary = read_ndjson(out)[1]
    assert summary["record"] == "kb_summary"
    # 3 datasets x 2 algorithms x 5 configs
    assert summary["experiments"] == 30
    assert summary["datasets"] == 3
    assert summary["pipelines"] == 10
    lines = read_ndjson(os.path.join(kb_root, "experiments.ndjson"))
    assert len(lines) == 30
    metrics = set()
    for rec in lines:
        if rec["status"] == "ok":
            metrics.update(rec["metric_means"])
    assert metrics == {"accuracy", "f1"}


def test_build_kb_resume_adds_nothing(corpus, built_kb, capsys, tmp_path):
    out = str(tmp_path / "resume.ndjson")
    code, _, _ = run_cli(build_args(corpus, built_kb, ["--out", out]),
                         capsys)
    assert code == 0
    assert read_ndjson(out)[1]["experiments"] == 30


def test_build_kb_parameter_mismatch(corpus, built_kb, capsys):
    argv = build_args(corpus, built_kb)
    argv[argv.index("--seed") + 1] = "8"
    code, _, err = run_cli(argv, capsys)
    assert code == 2
    assert "seed" in err


# -- recommend --------------------------------------------------------------------


def test_recommend_knn_report(corpus, built_kb, capsys, tmp_path):
    out = str(tmp_path / "rec.ndjson")
    code, stdout, _ = run_cli(["recommend", corpus["dataset"],
                               "--target", "target", "--kb", built_kb,
                               "--metric", "accuracy", "--top", "3",
                               "--seed", "2", "--out", out], capsys)
    assert code == 0
    records = read_ndjson(out)
    kinds = [r["record"] for r in records]
    assert kinds[0] == "run"
    assert kinds[1] == "neighbors"
    assert kinds[2:] == ["recommendation"] * 3
    ranks = [r["rank"] for r in records[2:]]
    assert ranks == [1, 2, 3]
    preds = [r["predicted"] for r in records[2:]]
    assert preds == sorted(preds, reverse=True)
    dists = [n["distance"] for n in records[1]["neighbors"]]
    assert dists == sorted(dists)


def test_recommend_exclude_self_drops_dataset(corpus, built_kb, capsys,
                                              tmp_path):
    out = str(tmp_path / "rec.ndjson")
    code, _, _ = run_cli(["recommend", corpus["dataset"],
                          "--target", "target", "--dataset-id", "set0",
                          "--kb", built_kb, "--exclude-self",
                          "--out", out], capsys)
    assert code == 0
    neighbors = read_ndjson(out)[1]["neighbors"]
    assert all(n["dataset_id"] != "set0" for n in neighbors)
    assert len(neighbors) == 2


def test_recommend_deterministic_bytes(corpus, built_kb, capsys, tmp_path):
    out = str(tmp_path / "rec.ndjson")
    argv = ["recommend", corpus["dataset"], "--target", "target",
            "--kb", built_kb, "--method", "rf", "--rf-trees", "30",
            "--seed", "7", "--out", out]
    assert run_cli(argv, capsys)[0] == 0
    with open(out, "rb") as f:
        first = f.read()
    assert run_cli(argv, capsys)[0] == 0
    with open(out, "rb") as f:
        assert f.read() == first


def test_recommend_env_var_supplies_kb(corpus, built_kb, capsys,
                                       monkeypatch, tmp_path):
    monkeypatch.setenv(KB_ENV_VAR, built_kb)
    out = str(tmp_path / "rec.ndjson")
    code, _, _ = run_cli(["recommend", corpus["dataset"],
                          "--target", "target", "--out", out], capsys)
    assert code == 0
    assert read_ndjson(out)[0]["config"]["kb"] is None


def test_recommend_without_kb_is_usage_error(corpus, capsys, monkeypatch):
    monkeypatch.delenv(KB_ENV_VAR, raising=False)
    code, _, err = run_cli(["recommend", corpus["dataset"],
                            "--target", "target"], capsys)
    assert code == 1
    assert "--kb" in err


def test_recommend_missing_kb_is_data_error(corpus, capsys, tmp_path):
    code, _, _ = run_cli(["recommend", corpus["dataset"],
                          "--target", "target",
                          "--kb", str(tmp_path / "ghost")], capsys)
    assert code == 2


def test_out_files_written_atomically(corpus, built_kb, capsys, tmp_path):
    # a failing run never leaves a partial report behind
    out = str(tmp_path / "report.ndjson")
    code, _, _ = run_cli(["recommend", corpus["dataset"],
                          "--target", "no-such-column", "--kb", built_kb,
                          "--out", out], capsys)
    assert code == 2
    assert not os.path.exists(out)
    assert not os.path.exists(out + ".tmp")


# -- loo-eval ---------------------------------------------------------------------


def test_loo_eval_needs_five_datasets(built_kb, capsys):
    code, _, err = run_cli(["loo-eval", "--kb", built_kb,
                            "--method", "knn"], capsys)
    assert code == 1
    assert "5" in err


def test_loo_eval_reports(corpus, capsys, tmp_path):
    # extend the corpus to five datasets to clear the floor
    rng = np.random.default_rng(3)
    rows_out = []
    for d in range(5):
        n = 30
        X = rng.normal(size=(n, 2)) * (1 + 0.2 * d)
        y = (X[:, 0] > 0).astype(int)
        if len(np.unique(y)) < 2:
            y[:3] = 1 - y[0]
        path = tmp_path / ("loo%d.csv" % d)
        write_csv(path, ["a", "b", "target"],
                  [["%.5f" % X[i, 0], "%.5f" % X[i, 1], "c%d" % y[i]]
                   for i in range(n)])
        rows_out.append(("loo%d" % d, str(path), "target"))
    manifest = tmp_path / "loo-manifest.csv"
    write_csv(manifest, ["id", "path", "target"], rows_out)
    kb_root = str(tmp_path / "kb5")
    code = main(["build-kb", str(manifest), "--kb", kb_root,
                 "--algorithms", "DECISION_TREE", "--configs-per-algo", "3",
                 "--metrics", "accuracy", "--cv-k", "2", "--cv-repeats",
                 "1", "--seed", "1"])
    capsys.readouterr()
    assert code == 0
    out = str(tmp_path / "loo.ndjson")
    code, _, _ = run_cli(["loo-eval", "--kb", kb_root, "--method", "knn",
                          "--resamples", "10", "--seed", "2",
                          "--out", out], capsys)
    assert code == 0
    records = read_ndjson(out)
    kinds = [r["record"] for r in records]
    assert kinds[0] == "run"
    assert kinds[1] == "baseline"
    assert "loo_summary" in kinds
    summary = next(r for r in records if r["record"] == "loo_summary")
    assert summary["method"] == "knn"
    assert summary["datasets"] == 5
    assert 0.0 <= summary["hit_rate"] <= 1.0
    assert 0.0 < summary["p_value"] <= 1.0
    rows = [r for r in records if r["record"] == "loo_row"]
    assert len(rows) == 5


# -- version ----------------------------------------------------------------------


def test_version_names_engine(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    stdout = capsys.readouterr().out
    assert "metacash" in stdout
    assert "compiled" in stdout or "python" in stdout
