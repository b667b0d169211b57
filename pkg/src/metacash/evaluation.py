"""Cross-validated scoring of one (algorithm, config) pipeline.

Metrics are accuracy plus macro-averaged precision, recall and F1.  A
per-class ratio with a zero denominator counts as 0 and raises the
``zero_division`` flag instead of failing.  evaluate_pipeline fits a fresh
pipeline per (repeat, fold) — encoder, imputer and scaler statistics all
come from the training split only.
"""

import resource
import time
from dataclasses import dataclass

import numpy as np

from .learners.model import fit_pipeline
from .utils import derive_seed

METRICS = ("accuracy", "precision", "recall", "f1")


class EvaluationError(RuntimeError):
    def __init__(self, message, repeat=None, fold=None):
        self.repeat = repeat
        self.fold = fold
        if repeat is not None:
            message = "%s (repeat %s, fold %s)" % (message, repeat, fold)
        super().__init__(message)


def confusion_matrix(y_true, y_pred, n_classes):
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    conf = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(conf, (y_true, y_pred), 1)
    return conf


def compute_metrics(conf):
    """Accuracy and macro precision/recall/F1 from a c x c count matrix
    (rows = true class, columns = predicted class)."""
    conf = np.asarray(conf)
    if conf.size == 0 or conf.sum() <= 0:
        raise ValueError("empty confusion matrix")
    if (conf < 0).any():
        raise ValueError("negative counts in confusion matrix")
    total = float(conf.sum())
    tp = np.diag(conf).astype(np.float64)
    pred_per_class = conf.sum(axis=0).astype(np.float64)
    true_per_class = conf.sum(axis=1).astype(np.float64)

    zero_division = False
    c = conf.shape[0]
    precision = np.zeros(c)
    recall = np.zeros(c)
    f1 = np.zeros(c)
    for k in range(c):
        if pred_per_class[k] > 0:
            precision[k] = tp[k] / pred_per_class[k]
        else:
            zero_division = True
        if true_per_class[k] > 0:
            recall[k] = tp[k] / true_per_class[k]
        else:
            zero_division = True
        denom = precision[k] + recall[k]
        if denom > 0:
            f1[k] = 2.0 * precision[k] * recall[k] / denom
        else:
            zero_division = True
    return {
        "accuracy": float(tp.sum() / total),
        "precision": float(precision.mean()),
        "recall": float(recall.mean()),
        "f1": float(f1.mean()),
        "zero_division": zero_division,
        "per_class": {
            "precision": precision.tolist(),
            "recall": recall.tolist(),
            "f1": f1.tolist(),
        },
    }


@dataclass
class ScoreSet:
    """Fold-level scores plus aggregates for one evaluated pipeline."""

    metrics: tuple
    fold_scores: dict            # metric name -> list of k*repeats floats
    runtime_s: float
    memory_bytes: int            # process high-water RSS, approximate
    zero_division: bool = False
    fold_shape: tuple = (0, 0)   # (repeats, k)

    def mean(self, name):
        return float(np.mean(self.fold_scores[name]))

    def std(self, name):
        return float(np.std(self.fold_scores[name]))

    def summary(self):
        return {m: {"mean": self.mean(m), "std": self.std(m)}
                for m in self.metrics}

    def to_jsonable(self):
        return {
            "metrics": list(self.metrics),
            "fold_scores": {k: list(v) for k, v in self.fold_scores.items()},
            "runtime_s": self.runtime_s,
            "memory_bytes": self.memory_bytes,
            "zero_division": self.zero_division,
            "fold_shape": list(self.fold_shape),
        }

    @classmethod
    def from_jsonable(cls, d):
        return cls(metrics=tuple(d["metrics"]),
                   fold_scores={k: list(v) for k, v in d["fold_scores"].items()},
                   runtime_s=float(d["runtime_s"]),
                   memory_bytes=int(d["memory_bytes"]),
                   zero_division=bool(d["zero_division"]),
                   fold_shape=tuple(d["fold_shape"]))


def _peak_rss_bytes():
    # ru_maxrss is kibibytes on Linux
    return int(resource.getrusage(resource.RUSAGE_SELF).ru_maxrss) * 1024


def evaluate_pipeline(algorithm, config, ds, plan, metrics=METRICS, seed=0):
    """Fit and score on every (repeat, fold) split of the plan.

    The per-fold fit seed is derived from (seed, repeat, fold), so a stored
    (config, seed, plan) triple replays to identical scores.
    """
    for m in metrics:
        if m not in METRICS:
            raise ValueError("unknown metric %r" % m)
    fold_scores = {m: [] for m in metrics}
    zero_division = False
    t0 = time.perf_counter()
    for r in range(plan.repeats):
        for f in range(plan.k):
            train_idx = plan.train_indices(r, f)
            test_idx = plan.test_indices(r, f)
            train_view = ds.subset(train_idx)
            try:
                model = fit_pipeline(algorithm, config, train_view,
                                     seed=derive_seed(seed, r, f))
                pred = model.predict(ds, rows=test_idx)
            except Exception as exc:
                raise EvaluationError(str(exc), repeat=r, fold=f) from exc
            conf = confusion_matrix(ds.labels[test_idx], pred, ds.c)
            result = compute_metrics(conf)
            zero_division = zero_division or result["zero_division"]
            for m in metrics:
                fold_scores[m].append(result[m])
    runtime = time.perf_counter() - t0
    return ScoreSet(metrics=tuple(metrics), fold_scores=fold_scores,
                    runtime_s=float(runtime), memory_bytes=_peak_rss_bytes(),
                    zero_division=zero_division,
                    fold_shape=(plan.repeats, plan.k))
