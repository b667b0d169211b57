"""Landmarking meta-features.

Five cheap learners are scored by internal stratified cross-validation
on the ordinal view of the dataset (missing entries imputed with the
train-fold mean).  Relative landmarkers are pairwise accuracy
differences, and the sub_* variants repeat the suite on a stratified
half subsample.
"""

import numpy as np

from ..engine import grow_tree
from ..folds import stratified_assignment
from .catalogue import LANDMARKERS
from .infotheo import discretize_equal_frequency, mutual_information

_VAR_FLOOR = 1e-9


def _impute_with_train_mean(X_tr, X_te):
    fill = np.nanmean(np.where(np.isnan(X_tr), np.nan, X_tr), axis=0)
    fill = np.where(np.isfinite(fill), fill, 0.0)
    X_tr = np.where(np.isnan(X_tr), fill, X_tr)
    X_te = np.where(np.isnan(X_te), fill, X_te)
    return X_tr, X_te


def _naive_bayes(X_tr, y_tr, X_te, n_classes, seed):
    n, p = X_tr.shape
    counts = np.bincount(y_tr, minlength=n_classes).astype(np.float64)
    mu = np.zeros((n_classes, p))
    var = np.ones((n_classes, p))
    log_prior = np.full(n_classes, -np.inf)
    for c in range(n_classes):
        rows = X_tr[y_tr == c]
        if len(rows) == 0:
            continue
        log_prior[c] = np.log(counts[c] / n)
        mu[c] = rows.mean(axis=0)
        var[c] = rows.var(axis=0) + _VAR_FLOOR
    diff = X_te[:, None, :] - mu[None, :, :]
    ll = -0.5 * np.sum(np.log(2.0 * np.pi * var) + diff * diff / var, axis=2)
    return np.argmax(log_prior[None, :] + ll, axis=1)


def _standardize_pair(X_tr, X_te):
    mean = X_tr.mean(axis=0)
    std = X_tr.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    return (X_tr - mean) / std, (X_te - mean) / std


def _nearest_neighbor(X_tr, y_tr, X_te, n_classes, seed):
    A, B = _standardize_pair(X_tr, X_te)
    d2 = np.sum((B[:, None, :] - A[None, :, :]) ** 2, axis=2)
    return y_tr[np.argmin(d2, axis=1)]


def _info_gains(X_tr, y_tr):
    n = len(y_tr)
    bins = max(1, min(10, int(np.ceil(np.sqrt(n)))))
    gains = np.zeros(X_tr.shape[1])
    for j in range(X_tr.shape[1]):
        codes = discretize_equal_frequency(X_tr[:, j], bins)
        gains[j] = mutual_information(codes.astype(np.int64), y_tr)
    return gains


def _elite_neighbor(X_tr, y_tr, X_te, n_classes, seed):
    j = int(np.argmax(_info_gains(X_tr, y_tr)))
    return _nearest_neighbor(X_tr[:, [j]], y_tr, X_te[:, [j]],
                             n_classes, seed)


def _decision_node(X_tr, y_tr, X_te, n_classes, seed):
    tree = grow_tree(X_tr, y_tr, n_classes=n_classes, criterion="entropy",
                     max_depth=1, seed=seed)
    return tree.predict(X_te)


def _random_node(X_tr, y_tr, X_te, n_classes, seed):
    rng = np.random.default_rng([seed, 7])
    j = int(rng.integers(X_tr.shape[1]))
    tree = grow_tree(X_tr[:, [j]], y_tr, n_classes=n_classes,
                     criterion="entropy", max_depth=1, seed=seed)
    return tree.predict(X_te[:, [j]])


_LANDMARK_FNS = {
    "naive_bayes": _naive_bayes,
    "one_nn": _nearest_neighbor,
    "elite_nn": _elite_neighbor,
    "decision_node": _decision_node,
    "random_node": _random_node,
}


def _landmark_suite(X, y, n_classes, seed):
    """Mean CV accuracy per landmarker, or None when any class is too
    small for 2 folds."""
    counts = np.bincount(y, minlength=n_classes)
    k = int(min(5, counts[counts > 0].min()))
    if k < 2 or X.shape[1] == 0:
        return None
    assignment = stratified_assignment(y, k, 1, seed)[0]
    totals = {name: [] for name in LANDMARKERS}
    for fold in range(k):
        te = assignment == fold
        tr = ~te
        X_tr, X_te = _impute_with_train_mean(X[tr], X[te])
        y_tr, y_te = y[tr], y[te]
        for name in LANDMARKERS:
            pred = _LANDMARK_FNS[name](X_tr, y_tr, X_te, n_classes, seed)
            totals[name].append(float(np.mean(pred == y_te)))
    return {name: float(np.mean(v)) for name, v in totals.items()}


def _stratified_half(y, n_classes, seed):
    rng = np.random.default_rng([seed, 13])
    picked = []
    for c in range(n_classes):
        idx = np.where(y == c)[0]
        if len(idx) == 0:
            continue
        idx = rng.permutation(idx)
        take = max(1, int(np.ceil(len(idx) / 2)))
        picked.append(idx[:take])
    return np.sort(np.concatenate(picked))


def extract_landmarking(ds, seed=0):
    entries = {}
    diagnostics = {}
    X = ds.ordinal_matrix()
    y = ds.labels

    base = _landmark_suite(X, y, ds.c, seed)
    for name in LANDMARKERS:
        entries["lm_" + name] = None if base is None else base[name]
    for i, a in enumerate(LANDMARKERS):
        for b in LANDMARKERS[i + 1:]:
            key = "rel_%s_vs_%s" % (a, b)
            entries[key] = None if base is None else base[a] - base[b]
    if base is None:
        diagnostics["landmarking_skipped"] = "class below 2-fold minimum"

    half = _stratified_half(y, ds.c, seed)
    sub = _landmark_suite(X[half], y[half], ds.c, seed)
    for name in LANDMARKERS:
        entries["sub_" + name] = None if sub is None else sub[name]
    if sub is None and base is not None:
        diagnostics["subsample_skipped"] = "class below 2-fold minimum"
    return entries, diagnostics
