"""Recommendation layer: scaled distances, nearest-dataset selection,
score pooling, the forest meta-model, and leave-one-out evaluation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metacash.kb.store import KnowledgeBase
from metacash.mf import CATALOGUE_VERSION
from metacash.recommend import (DEFAULT_K, WEIGHT_EPSILON, PipelineEncoder,
                                RecommendError, ScalingStats,
                                euclidean_distance, knd_selection, loo_eval,
                                recommend_from_entries, recommend_rf,
                                train_rf_metamodel)


def flat_stats(names):
    k = len(names)
    return ScalingStats(names=tuple(names), mean=np.zeros(k),
                        std=np.ones(k), usable=np.ones(k, dtype=bool))


# -- distance ------------------------------------------------------------------


def test_three_four_five():
    stats = flat_stats(("a", "b"))
    d = euclidean_distance({"a": 0.0, "b": 0.0}, {"a": 3.0, "b": 4.0}, stats)
    assert d == pytest.approx(5.0, abs=1e-12)


def test_missing_entries_rescale_by_overlap():
    stats = flat_stats(("a", "b", "c", "d"))
    a = {"a": 0.0, "b": 0.0, "c": 0.0, "d": 0.0}
    b = {"a": 3.0, "b": 4.0}
    # c and d are skipped, the squared sum over 2 of 4 usable entries is
    # scaled back up by 4/2
    d = euclidean_distance(a, b, stats)
    assert d == pytest.approx(np.sqrt(25.0 * 2.0), abs=1e-12)
    # skipping is symmetric in the two vectors
    assert euclidean_distance(b, a, stats) == pytest.approx(d, abs=1e-12)


def test_unusable_entries_do_not_count(tmp_path):
    stats = ScalingStats(names=("a", "b"), mean=np.zeros(2),
                         std=np.array([1.0, 0.0]),
                         usable=np.array([True, False]))
    # b is constant across the knowledge base, so only a contributes and
    # the rescale denominator is 1
    d = euclidean_distance({"a": 0.0, "b": 5.0}, {"a": 2.0, "b": -5.0}, stats)
    assert d == pytest.approx(2.0, abs=1e-12)


def test_no_common_entries_is_an_error():
    stats = flat_stats(("a", "b"))
    with pytest.raises(RecommendError, match="no usable"):
        euclidean_distance({"a": 1.0}, {"b": 2.0}, stats)


def test_standardization_from_kb_statistics():
    entries = [{"a": 10.0, "b": 1.0}, {"a": 20.0, "b": 1.0}]
    stats = ScalingStats.from_entry_dicts(entries)
    # from_entry_dicts maps over the full catalogue; names absent from
    # every dict stay unusable
    assert stats.usable.sum() == 0
    entries = [{"n_instances": 10.0, "n_classes": 2.0},
               {"n_instances": 20.0, "n_classes": 4.0}]
    stats = ScalingStats.from_entry_dicts(entries)
    i = stats.names.index("n_instances")
    assert stats.mean[i] == 15.0
    assert stats.std[i] == 5.0
    assert stats.usable[i]
    z = stats.standardize({"n_instances": 10.0, "n_classes": 2.0})
    assert z[i] == pytest.approx(-1.0)


vec = st.lists(st.floats(-50, 50), min_size=3, max_size=3)


@settings(max_examples=100, deadline=None)
@given(vec, vec, vec)
def test_distance_axioms_on_complete_vectors(a, b, c):
    stats = flat_stats(("a", "b", "c"))
    to_e = lambda v: dict(zip(("a", "b", "c"), v))
    dab = euclidean_distance(to_e(a), to_e(b), stats)
    dba = euclidean_distance(to_e(b), to_e(a), stats)
    assert dab == pytest.approx(dba, abs=1e-9)
    assert euclidean_distance(to_e(a), to_e(a), stats) == 0.0
    dac = euclidean_distance(to_e(a), to_e(c), stats)
    dcb = euclidean_distance(to_e(c), to_e(b), stats)
    assert dab <= dac + dcb + 1e-9


# -- fixtures -------------------------------------------------------------------


def experiment(ds_id, pl_id, algorithm, acc, status="ok"):
    ok = status == "ok"
    return {
        "experiment_id": "ex-%s-%s" % (ds_id, pl_id),
        "dataset_id": ds_id, "pipeline_id": pl_id,
        "algorithm": algorithm, "config": {"max_features": 0.5},
        "status": status,
        "scores": {"accuracy": [acc]} if ok else None,
        "metric_means": {"accuracy": acc} if ok else {},
        "error": None if ok else "boom",
        "cv": {"k": 2, "repeats": 1}, "seed": 0,
        "timestamp": "t", "runtime_s": 1.0, "memory_bytes": 1,
        "engine": "test",
    }


def toy_kb(root, datasets, pipelines, scores):
    """datasets: ds_id -> mf entry dict; pipelines: pl_id -> algorithm;
    scores: (ds_id, pl_id) -> accuracy (None marks a failure)."""
    kb = KnowledgeBase.create(str(root), {
        "catalogue_version": CATALOGUE_VERSION,
        "metrics": ["accuracy"], "cv_k": 2, "cv_repeats": 1, "seed": 0,
        "algorithms": sorted(set(pipelines.values())),
        "configs_per_algo": 1,
    })
    for ds_id, entries in datasets.items():
        kb.add_dataset({"dataset_id": ds_id, "name": ds_id,
                        "path": "/x/%s.csv" % ds_id, "target": "y",
                        "n": 10, "p": 3, "c": 2,
                        "mf": {"entries": entries}})
    for pl_id, algorithm in pipelines.items():
        kb.add_pipeline({"pipeline_id": pl_id, "algorithm": algorithm,
                         "config": {"max_features": 0.5}})
    for (ds_id, pl_id), acc in scores.items():
        if acc is None:
            kb.append_experiment(experiment(ds_id, pl_id, pipelines[pl_id],
                                            0.0, status="failed"))
        else:
            kb.append_experiment(experiment(ds_id, pl_id, pipelines[pl_id],
                                            acc))
    return kb


def grid_datasets(values):
    """Meta-feature dicts spread along n_instances with a second varying
    entry so two catalogue dimensions are usable."""
    return {ds_id: {"n_instances": float(v), "n_attributes": float(v % 7 + 2)}
            for ds_id, v in values.items()}


# -- nearest datasets ------------------------------------------------------------


def test_knd_matches_exhaustive_sort(tmp_path):
    rng = np.random.default_rng(8)
    datasets = {"ds%02d" % i: {"n_instances": float(rng.integers(10, 500)),
                               "n_attributes": float(rng.integers(2, 40)),
                               "n_classes": float(rng.integers(2, 9))}
                for i in range(15)}
    kb = toy_kb(tmp_path / "kb", datasets, {"pl-a": "DECISION_TREE"},
                {(ds, "pl-a"): 0.5 for ds in datasets})
    query = {"n_instances": 100.0, "n_attributes": 11.0, "n_classes": 3.0}

    nset = knd_selection(query, kb, k=4)
    stats = ScalingStats.from_entry_dicts(list(datasets.values()))
    brute = sorted((euclidean_distance(query, e, stats), ds_id)
                   for ds_id, e in datasets.items())
    assert nset.neighbors == [(ds, d) for d, ds in brute[:4]]


def test_knd_ties_break_by_dataset_id(tmp_path):
    entries = {"n_instances": 50.0, "n_attributes": 5.0}
    datasets = {"zz": dict(entries), "aa": dict(entries),
                "mm": {"n_instances": 400.0, "n_attributes": 30.0}}
    kb = toy_kb(tmp_path / "kb", datasets, {"pl-a": "DECISION_TREE"},
                {(ds, "pl-a"): 0.5 for ds in datasets})
    nset = knd_selection(entries, kb, k=2)
    assert nset.ids() == ["aa", "zz"]
    assert nset.neighbors[0][1] == nset.neighbors[1][1] == 0.0


def test_knd_exclude_removes_dataset(tmp_path):
    datasets = grid_datasets({"d1": 10, "d2": 20, "d3": 30, "d4": 40})
    kb = toy_kb(tmp_path / "kb", datasets, {"pl-a": "DECISION_TREE"},
                {(ds, "pl-a"): 0.5 for ds in datasets})
    nset = knd_selection(datasets["d2"], kb, k=10, exclude=("d2",))
    assert "d2" not in nset.ids()
    assert len(nset.neighbors) == 3
    # scaling statistics are recomputed without the excluded dataset
    held_out = ScalingStats.from_entry_dicts(
        [e for ds, e in datasets.items() if ds != "d2"])
    i = held_out.names.index("n_instances")
    assert held_out.mean[i] == pytest.approx(np.mean([10, 30, 40]))
    assert nset.stats.mean[i] == pytest.approx(held_out.mean[i])


def test_knd_empty_kb_view_is_an_error(tmp_path):
    datasets = grid_datasets({"d1": 10})
    kb = toy_kb(tmp_path / "kb", datasets, {"pl-a": "DECISION_TREE"},
                {("d1", "pl-a"): 0.5})
    with pytest.raises(RecommendError, match="no datasets"):
        knd_selection(datasets["d1"], kb, k=1, exclude=("d1",))


# -- knn pooling ------------------------------------------------------------------


def test_weighted_average_hand_computed(tmp_path):
    datasets = {"near": {"n_instances": 10.0, "n_attributes": 2.0},
                "far": {"n_instances": 20.0, "n_attributes": 4.0}}
    kb = toy_kb(tmp_path / "kb", datasets,
                {"pl-x": "DECISION_TREE"},
                {("near", "pl-x"): 0.9, ("far", "pl-x"): 0.5})
    query = {"n_instances": 10.0, "n_attributes": 2.0}
    rec = recommend_from_entries(query, kb, "accuracy", k=2)

    stats = ScalingStats.from_entry_dicts(list(datasets.values()))
    d_near = euclidean_distance(query, datasets["near"], stats)
    d_far = euclidean_distance(query, datasets["far"], stats)
    assert d_near == 0.0
    w = np.array([1.0 / (d_near + WEIGHT_EPSILON),
                  1.0 / (d_far + WEIGHT_EPSILON)])
    w = w / w.sum()
    expected = w @ np.array([0.9, 0.5])

    assert len(rec.items) == 1
    item = rec.items[0]
    assert item["predicted"] == pytest.approx(expected, abs=1e-12)
    supporters = {s["dataset_id"]: s for s in item["supporters"]}
    assert supporters["near"]["weight"] == pytest.approx(w[0], abs=1e-12)
    assert supporters["far"]["weight"] == pytest.approx(w[1], abs=1e-12)
    assert sum(s["weight"] for s in item["supporters"]) == pytest.approx(1.0)
    assert rec.neighbors[0]["dataset_id"] == "near"


def test_closer_neighbor_weighs_more(tmp_path):
    datasets = grid_datasets({"d1": 10, "d2": 25, "d3": 90})
    kb = toy_kb(tmp_path / "kb", datasets, {"pl-x": "DECISION_TREE"},
                {(ds, "pl-x"): 0.5 for ds in datasets})
    rec = recommend_from_entries(grid_datasets({"q": 12})["q"], kb,
                                 "accuracy", k=3)
    dist = {n["dataset_id"]: n["distance"] for n in rec.neighbors}
    weight = {s["dataset_id"]: s["weight"]
              for s in rec.items[0]["supporters"]}
    ordered = sorted(dist, key=dist.get)
    assert weight[ordered[0]] > weight[ordered[1]] > weight[ordered[2]]


def test_dominant_pipeline_ranks_first(tmp_path):
    datasets = grid_datasets({"d1": 10, "d2": 20, "d3": 30})
    pipelines = {"pl-best": "DECISION_TREE", "pl-mid": "SVM",
                 "pl-poor": "ADABOOST"}
    scores = {}
    for ds in datasets:
        scores[(ds, "pl-best")] = 0.95
        scores[(ds, "pl-mid")] = 0.7
        scores[(ds, "pl-poor")] = 0.4
    kb = toy_kb(tmp_path / "kb", datasets, pipelines, scores)
    rec = recommend_from_entries(grid_datasets({"q": 15})["q"], kb,
                                 "accuracy", k=3)
    assert [i["pipeline_id"] for i in rec.items] == ["pl-best", "pl-mid",
                                                     "pl-poor"]


def test_failed_experiments_never_pool(tmp_path):
    datasets = grid_datasets({"d1": 10, "d2": 20})
    kb = toy_kb(tmp_path / "kb", datasets,
                {"pl-ok": "DECISION_TREE", "pl-bad": "SVM"},
                {("d1", "pl-ok"): 0.8, ("d2", "pl-ok"): 0.6,
                 ("d1", "pl-bad"): None, ("d2", "pl-bad"): None})
    rec = recommend_from_entries(grid_datasets({"q": 12})["q"], kb,
                                 "accuracy", k=2)
    assert [i["pipeline_id"] for i in rec.items] == ["pl-ok"]


def test_top_n_truncates_after_full_ranking(tmp_path):
    datasets = grid_datasets({"d1": 10, "d2": 20})
    pipelines = {"pl-%d" % i: "DECISION_TREE" for i in range(6)}
    scores = {(ds, pl): 0.5 + 0.05 * i
              for ds in datasets
              for i, pl in enumerate(sorted(pipelines))}
    kb = toy_kb(tmp_path / "kb", datasets, pipelines, scores)
    rec = recommend_from_entries(grid_datasets({"q": 12})["q"], kb,
                                 "accuracy", k=2, top_n=3)
    assert len(rec.items) == 3
    assert [i["pipeline_id"] for i in rec.items] == ["pl-5", "pl-4", "pl-3"]
    preds = [i["predicted"] for i in rec.items]
    assert preds == sorted(preds, reverse=True)


def test_equal_scores_order_by_pipeline_id(tmp_path):
    datasets = grid_datasets({"d1": 10, "d2": 20})
    pipelines = {"pl-b": "DECISION_TREE", "pl-a": "SVM"}
    scores = {(ds, pl): 0.5 for ds in datasets for pl in pipelines}
    kb = toy_kb(tmp_path / "kb", datasets, pipelines, scores)
    rec = recommend_from_entries(grid_datasets({"q": 12})["q"], kb,
                                 "accuracy", k=2)
    assert [i["pipeline_id"] for i in rec.items] == ["pl-a", "pl-b"]


# -- forest meta-model --------------------------------------------------------------


def spread_kb(root, n_datasets=6):
    """Datasets whose best pipeline flips with n_instances, so promising
    labels carry signal."""
    datasets = grid_datasets(
        {"d%d" % i: 10 + 40 * i for i in range(n_datasets)})
    pipelines = {"pl-small": "DECISION_TREE", "pl-large": "SVM"}
    scores = {}
    for i, ds in enumerate(sorted(datasets)):
        small_wins = i < n_datasets // 2
        scores[(ds, "pl-small")] = 0.9 if small_wins else 0.6
        scores[(ds, "pl-large")] = 0.6 if small_wins else 0.9
    return toy_kb(root, datasets, pipelines, scores), datasets


def test_metamodel_requires_two_datasets(tmp_path):
    datasets = grid_datasets({"d1": 10})
    kb = toy_kb(tmp_path / "kb", datasets, {"pl-a": "DECISION_TREE"},
                {("d1", "pl-a"): 0.5})
    with pytest.raises(RecommendError, match="two datasets"):
        train_rf_metamodel(kb, "accuracy")


def test_metamodel_rejects_degenerate_labels(tmp_path):
    datasets = grid_datasets({"d1": 10, "d2": 20})
    kb = toy_kb(tmp_path / "kb", datasets, {"pl-a": "DECISION_TREE"},
                {(ds, "pl-a"): 0.5 for ds in datasets})
    # the only pipeline is the per-dataset best, so every label is 1
    with pytest.raises(RecommendError, match="labels every pipeline"):
        train_rf_metamodel(kb, "accuracy")


def test_metamodel_learns_and_ranks(tmp_path):
    kb, datasets = spread_kb(tmp_path / "kb")
    model = train_rf_metamodel(kb, "accuracy", n_trees=60, seed=1)
    assert model.n_total == 12
    assert model.n_promising == 6
    candidates = [{"pipeline_id": pl_id, "algorithm": rec["algorithm"],
                   "config": rec["config"]}
                  for pl_id, rec in kb.pipelines.items()]
    small_query = {"n_instances": 12.0, "n_attributes": 3.0}
    large_query = {"n_instances": 230.0, "n_attributes": 3.0}
    rec_small = recommend_rf(small_query, model, candidates)
    rec_large = recommend_rf(large_query, model, candidates)
    assert rec_small.items[0]["pipeline_id"] == "pl-small"
    assert rec_large.items[0]["pipeline_id"] == "pl-large"
    for item in rec_small.items + rec_large.items:
        assert 0.0 <= item["predicted"] <= 1.0


def test_recommend_rf_guards(tmp_path):
    kb, _ = spread_kb(tmp_path / "kb")
    model = train_rf_metamodel(kb, "accuracy", n_trees=20, seed=1)
    with pytest.raises(RecommendError, match="no candidate"):
        recommend_rf({"n_instances": 10.0}, model, [])
    with pytest.raises(RecommendError, match="catalogue"):
        recommend_rf({"n_instances": 10.0}, model,
                     [{"pipeline_id": "pl-small",
                       "algorithm": "DECISION_TREE", "config": {}}],
                     catalogue_version="other/9")


def test_pipeline_encoder_layout():
    enc = PipelineEncoder(algorithms=("DECISION_TREE", "SVM"))
    from metacash.hpo.bayes import SpaceEncoder
    from metacash.learners.spaces import hp_space
    w_dt = SpaceEncoder(hp_space("DECISION_TREE")).n_out
    w_svm = SpaceEncoder(hp_space("SVM")).n_out
    assert enc.n_out == 2 + w_dt + w_svm
    v = enc.encode("SVM", {"complexity": 1.0, "kernel": "rbf",
                           "coef0": 0.0, "gamma": 0.01})
    assert v.shape == (enc.n_out,)
    np.testing.assert_array_equal(v[:2], [0.0, 1.0])
    # the decision-tree block reads as inactive
    dt_block = v[2:2 + w_dt]
    assert np.all((dt_block == -1.0) | (dt_block == 0.0))


# -- leave-one-out evaluation ----------------------------------------------------


def test_loo_identical_datasets_hit_everything(tmp_path):
    entries = {"n_instances": 50.0, "n_attributes": 5.0}
    datasets = {"d%d" % i: dict(entries) for i in range(4)}
    # jitter one entry so the scaling statistics stay usable
    for i, ds in enumerate(sorted(datasets)):
        datasets[ds]["n_instances"] = 50.0 + 0.001 * i
    pipelines = {"pl-good": "DECISION_TREE", "pl-bad": "SVM"}
    scores = {}
    for ds in datasets:
        scores[(ds, "pl-good")] = 0.9
        scores[(ds, "pl-bad")] = 0.4
    kb = toy_kb(tmp_path / "kb", datasets, pipelines, scores)
    report = loo_eval(kb, "accuracy", k=3)
    summary = report["methods"]["knn"]
    assert summary["hit_rate"] == 1.0
    assert summary["mean_regret"] == 0.0
    assert all(r["recommended"] == "pl-good" for r in summary["rows"])


def test_loo_rows_and_regret_accounting(tmp_path):
    kb, _ = spread_kb(tmp_path / "kb")
    report = loo_eval(kb, "accuracy", k=2, methods=("knn", "rf"),
                      rf_trees=30, baseline_resamples=10, seed=4)
    assert set(report["methods"]) == {"knn", "rf"}
    for summary in report["methods"].values():
        assert summary["datasets"] == 6
        assert len(summary["rows"]) == 6
        for row in summary["rows"]:
            assert row["achieved"] is not None
            assert row["regret"] >= 0.0
            assert row["hit"] == (row["achieved"]
                                  >= (1 - 0.05) * row["best"])
        assert 0.0 < summary["p_value"] <= 1.0
    base = report["baseline"]
    assert base["resamples"] == 10
    assert len(base["hit_rates"]) == 10
    assert base["mean_hit_rate"] == pytest.approx(np.mean(base["hit_rates"]))


def test_loo_random_scores_look_like_baseline(tmp_path):
    rng = np.random.default_rng(33)
    datasets = grid_datasets({"d%02d" % i: int(v) for i, v in
                              enumerate(rng.integers(10, 900, size=10))})
    pipelines = {"pl-%d" % j: "DECISION_TREE" for j in range(6)}
    scores = {(ds, pl): float(rng.uniform(0.3, 0.9))
              for ds in datasets for pl in pipelines}
    kb = toy_kb(tmp_path / "kb", datasets, pipelines, scores)
    report = loo_eval(kb, "accuracy", k=3, baseline_resamples=50, seed=9)
    # recommendations built on scrambled scores should not beat chance
    assert report["methods"]["knn"]["p_value"] > 0.05


def test_loo_needs_two_datasets(tmp_path):
    datasets = grid_datasets({"d1": 10})
    kb = toy_kb(tmp_path / "kb", datasets, {"pl-a": "DECISION_TREE"},
                {("d1", "pl-a"): 0.5})
    with pytest.raises(RecommendError, match="two datasets"):
        loo_eval(kb, "accuracy")
