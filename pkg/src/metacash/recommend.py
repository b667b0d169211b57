"""Pipeline recommendation from the knowledge base.

Two methods: k-nearest-datasets retrieval with inverse-distance
weighted score pooling, and a random-forest meta-model classifying
(meta-features, pipeline encoding) pairs as promising or not.
Meta-feature vectors are z-scored by knowledge-base statistics before
the distance; entries missing on either side are skipped and the sum
is rescaled to keep distances comparable across different overlaps.
"""

from dataclasses import dataclass, field

import numpy as np

from .hpo.bayes import SpaceEncoder
from .kb.store import KBError
from .learners.forest import Forest
from .learners.spaces import ALGORITHMS, hp_space
from .mf import CATALOGUE, CATALOGUE_VERSION, extract_all

WEIGHT_EPSILON = 1e-6
DEFAULT_K = 5
DEFAULT_PROMISING_THRESHOLD = 0.01
METAMODEL_TREES = 500


class RecommendError(RuntimeError):
    pass


# -- distances ----------------------------------------------------------


@dataclass
class ScalingStats:
    """Per-entry mean/std over the KB's meta-feature vectors.  Entries
    that are missing everywhere or constant are unusable and excluded
    from distances."""

    names: tuple
    mean: np.ndarray
    std: np.ndarray
    usable: np.ndarray
    catalogue_version: str = CATALOGUE_VERSION

    @classmethod
    def from_entry_dicts(cls, entry_dicts):
        names = CATALOGUE
        table = np.full((len(entry_dicts), len(names)), np.nan)
        for i, entries in enumerate(entry_dicts):
            for j, name in enumerate(names):
                v = entries.get(name)
                if v is not None:
                    table[i, j] = float(v)
        present = ~np.isnan(table)
        count = present.sum(axis=0)
        mean = np.zeros(len(names))
        std = np.zeros(len(names))
        for j in range(len(names)):
            if count[j]:
                col = table[present[:, j], j]
                mean[j] = col.mean()
                std[j] = col.std()
        usable = (count > 0) & (std > 0)
        return cls(names=names, mean=mean, std=std, usable=usable)

    def standardize(self, entries):
        """Vector with NaN for missing or unusable entries."""
        out = np.full(len(self.names), np.nan)
        for j, name in enumerate(self.names):
            v = entries.get(name)
            if v is not None and self.usable[j]:
                out[j] = (float(v) - self.mean[j]) / self.std[j]
        return out


def euclidean_distance(a_entries, b_entries, stats):
    """Distance between two meta-feature entry dicts under KB scaling.

    Entries missing on either side are skipped; the squared sum is then
    rescaled by (usable count / used count) so vectors with different
    overlap stay comparable.
    """
    a = stats.standardize(a_entries)
    b = stats.standardize(b_entries)
    both = ~(np.isnan(a) | np.isnan(b))
    used = int(both.sum())
    if used == 0:
        raise RecommendError("no usable meta-feature dimensions in common")
    total = float(np.sum((a[both] - b[both]) ** 2))
    k_total = int(stats.usable.sum())
    return float(np.sqrt(total * (k_total / used)))


@dataclass
class NeighborSet:
    neighbors: list                # (dataset_id, distance), ascending
    k: int
    stats: ScalingStats

    def ids(self):
        return [ds_id for ds_id, _ in self.neighbors]


def knd_selection(query_entries, kb, k=DEFAULT_K, exclude=()):
    """The k nearest KB datasets to the query meta-feature dict."""
    entry_map = {ds_id: e for ds_id, e in kb.meta_feature_entries().items()
                 if ds_id not in exclude}
    if not entry_map:
        raise RecommendError("knowledge base has no datasets to compare")
    stats = ScalingStats.from_entry_dicts(list(entry_map.values()))
    scored = []
    for ds_id, entries in entry_map.items():
        scored.append((euclidean_distance(query_entries, entries, stats),
                       ds_id))
    scored.sort(key=lambda t: (t[0], t[1]))
    chosen = [(ds_id, dist) for dist, ds_id in scored[:k]]
    return NeighborSet(neighbors=chosen, k=int(k), stats=stats)


# -- kNN recommendation --------------------------------------------------


@dataclass
class Recommendation:
    method: str
    metric: str
    items: list                    # dicts sorted by predicted desc
    neighbors: list = field(default_factory=list)


def recommend_from_entries(query_entries, kb, metric, k=DEFAULT_K,
                           top_n=10, exclude=()):
    """kNN recommendation given an already-extracted meta-feature dict."""
    nset = knd_selection(query_entries, kb, k=k, exclude=exclude)
    weight_of = {ds_id: 1.0 / (dist + WEIGHT_EPSILON)
                 for ds_id, dist in nset.neighbors}
    pooled = {}
    for ds_id, dist in nset.neighbors:
        for rec in kb.ok_experiments(ds_id, metric):
            entry = pooled.setdefault(rec["pipeline_id"], {
                "pipeline_id": rec["pipeline_id"],
                "algorithm": rec["algorithm"],
                "config": rec["config"],
                "supporters": [],
            })
            entry["supporters"].append(
                {"dataset_id": ds_id, "weight": weight_of[ds_id],
                 "score": rec["metric_means"][metric]})
    if not pooled:
        raise RecommendError("neighbors hold no experiments for metric %r"
                             % metric)
    items = []
    for entry in pooled.values():
        weights = np.array([s["weight"] for s in entry["supporters"]])
        scores = np.array([s["score"] for s in entry["supporters"]])
        weights = weights / weights.sum()
        for s, w in zip(entry["supporters"], weights):
            s["weight"] = float(w)
        entry["predicted"] = float(weights @ scores)
        items.append(entry)
    items.sort(key=lambda e: (-e["predicted"], e["pipeline_id"]))
    return Recommendation(method="knn", metric=metric, items=items[:top_n],
                          neighbors=[{"dataset_id": d, "distance": dist}
                                     for d, dist in nset.neighbors])


def recommend_knn(query_ds, kb, metric, k=DEFAULT_K, top_n=10, seed=0,
                  exclude=()):
    """Extract the query's meta-features, then recommend by kNN pooling."""
    mf = extract_all(query_ds, seed=seed)
    return recommend_from_entries(mf.entries, kb, metric, k=k, top_n=top_n,
                                  exclude=exclude)


# -- random-forest meta-model --------------------------------------------


class PipelineEncoder:
    """(algorithm, config) -> fixed-width vector: algorithm one-hot,
    then each algorithm's hyperparameters normalized to [0, 1] in their
    declared bounds (log dims in log space); slots belonging to other
    algorithms or inactive conditionals read -1 (numeric) or zero
    (categorical one-hot)."""

    def __init__(self, algorithms=ALGORITHMS):
        self.algorithms = tuple(algorithms)
        self._encoders = {a: SpaceEncoder(hp_space(a))
                          for a in self.algorithms}
        self.n_out = len(self.algorithms) + sum(
            self._encoders[a].n_out for a in self.algorithms)

    def encode(self, algorithm, config):
        parts = [np.zeros(len(self.algorithms))]
        parts[0][self.algorithms.index(algorithm)] = 1.0
        for a in self.algorithms:
            if a == algorithm:
                parts.append(self._encoders[a].encode(config))
            else:
                parts.append(self._encoders[a].encode({}))
        return np.concatenate(parts)


@dataclass
class MetaModel:
    forest: Forest
    pipeline_encoder: PipelineEncoder
    mf_medians: np.ndarray
    metric: str
    threshold: float
    n_promising: int
    n_total: int
    catalogue_version: str = CATALOGUE_VERSION

    def _features(self, query_entries, algorithm, config):
        vec = np.array([np.nan if query_entries.get(n) is None
                        else float(query_entries[n]) for n in CATALOGUE])
        missing = np.isnan(vec)
        vec[missing] = self.mf_medians[missing]
        return np.concatenate([vec,
                               self.pipeline_encoder.encode(algorithm,
                                                            config)])

    def promising_probability(self, query_entries, candidates):
        X = np.array([self._features(query_entries, c["algorithm"],
                                     c["config"]) for c in candidates])
        return self.forest.predict_proba(X)[:, 1]


def _mf_matrix_and_medians(entry_dicts):
    table = np.array([[np.nan if e.get(n) is None else float(e[n])
                       for n in CATALOGUE] for e in entry_dicts])
    medians = np.zeros(table.shape[1])
    for j in range(table.shape[1]):
        col = table[:, j]
        col = col[~np.isnan(col)]
        medians[j] = np.median(col) if len(col) else 0.0
    return table, medians


def train_rf_metamodel(kb, metric, promising_threshold=DEFAULT_PROMISING_THRESHOLD,
                       n_trees=METAMODEL_TREES, seed=0, exclude=()):
    """Label each stored experiment promising (within the threshold of its
    dataset's best) and fit the forest on meta-features plus pipeline
    encodings.  Meta-feature gaps are filled with KB-wide medians."""
    entry_map = {ds_id: e for ds_id, e in kb.meta_feature_entries().items()
                 if ds_id not in exclude}
    if len(entry_map) < 2:
        raise RecommendError("need at least two datasets to train on")
    table, medians = _mf_matrix_and_medians(list(entry_map.values()))
    encoder = PipelineEncoder()
    rows, labels = [], []
    for i, (ds_id, entries) in enumerate(entry_map.items()):
        recs = kb.ok_experiments(ds_id, metric)
        if not recs:
            continue
        best = max(r["metric_means"][metric] for r in recs)
        cutoff = (1.0 - promising_threshold) * best
        mf_vec = table[i].copy()
        missing = np.isnan(mf_vec)
        mf_vec[missing] = medians[missing]
        for r in recs:
            rows.append(np.concatenate([
                mf_vec, encoder.encode(r["algorithm"], r["config"])]))
            labels.append(1 if r["metric_means"][metric] >= cutoff else 0)
    if not rows:
        raise RecommendError("no experiments for metric %r" % metric)
    y = np.asarray(labels, dtype=np.int64)
    if y.min() == y.max():
        raise RecommendError(
            "promising threshold %g labels every pipeline the same way"
            % promising_threshold)
    forest = Forest(n_trees=n_trees, bootstrap=True, criterion="gini",
                    max_features=0.3, seed=seed)
    forest.fit(np.asarray(rows), y, n_classes=2)
    return MetaModel(forest=forest, pipeline_encoder=encoder,
                     mf_medians=medians, metric=metric,
                     threshold=float(promising_threshold),
                     n_promising=int(y.sum()), n_total=len(y))


def recommend_rf(query_entries, model, candidates, top_n=10,
                 catalogue_version=CATALOGUE_VERSION):
    """Rank candidate pipelines by the meta-model's promising
    probability."""
    if not candidates:
        raise RecommendError("no candidate pipelines supplied")
    if catalogue_version != model.catalogue_version:
        raise RecommendError("meta-feature catalogue version mismatch")
    probs = model.promising_probability(query_entries, candidates)
    items = [{"pipeline_id": c["pipeline_id"], "algorithm": c["algorithm"],
              "config": c["config"], "predicted": float(p)}
             for c, p in zip(candidates, probs)]
    items.sort(key=lambda e: (-e["predicted"], e["pipeline_id"]))
    return Recommendation(method="rf", metric=model.metric,
                          items=items[:top_n])


# -- leave-one-dataset-out evaluation ------------------------------------


def loo_eval(kb, metric, k=DEFAULT_K, tolerance=0.05, methods=("knn",),
             rf_trees=METAMODEL_TREES, baseline_resamples=0, seed=0):
    """For every KB dataset: hide it, recommend top-1 from the rest, and
    compare the recommendation's stored score against the dataset's true
    best.  A hit is a score within ``tolerance`` (relative) of the best.

    The baseline draws one stored pipeline per dataset uniformly at
    random, scores the resulting hit-rate, and repeats that
    ``baseline_resamples`` times; each method's p_value is the fraction
    of resamples reaching its hit-rate (add-one corrected).
    """
    dataset_ids = [ds_id for ds_id in kb.datasets
                   if kb.ok_experiments(ds_id, metric)]
    if len(dataset_ids) < 2:
        raise RecommendError("need at least two datasets with experiments")
    candidates = [{"pipeline_id": pl_id,
                   "algorithm": rec["algorithm"],
                   "config": rec["config"]}
                  for pl_id, rec in kb.pipelines.items()]
    truths = {}
    for ds_id in dataset_ids:
        truths[ds_id] = {r["pipeline_id"]: r["metric_means"][metric]
                         for r in kb.ok_experiments(ds_id, metric)}
    bests = {ds_id: max(t.values()) for ds_id, t in truths.items()}
    report = {"metric": metric, "k": k, "tolerance": tolerance,
              "methods": {}}
    if baseline_resamples:
        rng = np.random.default_rng(seed)
        rates = []
        for _ in range(baseline_resamples):
            hits = 0
            for ds_id in dataset_ids:
                pl = rng.choice(sorted(truths[ds_id]))
                hits += truths[ds_id][pl] >= (1.0 - tolerance) * bests[ds_id]
            rates.append(hits / len(dataset_ids))
        report["baseline"] = {"resamples": int(baseline_resamples),
                              "hit_rates": rates,
                              "mean_hit_rate": float(np.mean(rates))}
    for method in methods:
        rows = []
        for ds_id in dataset_ids:
            truth = truths[ds_id]
            best = bests[ds_id]
            entries = kb.datasets[ds_id]["mf"]["entries"]
            if method == "knn":
                rec = recommend_from_entries(entries, kb, metric, k=k,
                                             top_n=len(candidates),
                                             exclude=(ds_id,))
                ranked = rec.items
            else:
                model = train_rf_metamodel(kb, metric, n_trees=rf_trees,
                                           seed=seed, exclude=(ds_id,))
                ranked = recommend_rf(entries, model, candidates,
                                      top_n=len(candidates)).items
            # top recommendation with a stored outcome on this dataset
            top = next((it for it in ranked if it["pipeline_id"] in truth),
                       None)
            achieved = truth[top["pipeline_id"]] if top else None
            hit = (achieved is not None
                   and achieved >= (1.0 - tolerance) * best)
            rows.append({"dataset_id": ds_id, "best": best,
                         "recommended": top["pipeline_id"] if top else None,
                         "achieved": achieved,
                         "regret": None if achieved is None
                         else best - achieved,
                         "hit": bool(hit)})
        hits = sum(r["hit"] for r in rows)
        regrets = [r["regret"] for r in rows if r["regret"] is not None]
        summary = {"datasets": len(rows), "hits": hits,
                   "hit_rate": hits / len(rows),
                   "mean_regret": float(np.mean(regrets)) if regrets else None,
                   "max_regret": float(max(regrets)) if regrets else None,
                   "rows": rows}
        if baseline_resamples:
            rates = report["baseline"]["hit_rates"]
            above = sum(r >= summary["hit_rate"] for r in rates)
            summary["p_value"] = (1 + above) / (1 + len(rates))
        report["methods"][method] = summary
    return report
