"""Decision tree object on top of the raw kernel arrays.

The kernel returns flat pre-order arrays (sklearn-style layout); this
module validates inputs, names the criteria, and adds prediction plus the
structure accessors the model-based meta-features need.
"""

from dataclasses import dataclass

import numpy as np

CRITERIA = {"gini": 0, "entropy": 1, "mse": 2, "friedman_mse": 3}
SPLITTERS = {"best": 0, "random": 1}


def _as_matrix(X):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be 2-dimensional")
    if not np.all(np.isfinite(X)):
        raise ValueError("tree input contains NaN or infinite values; impute first")
    return X


@dataclass
class Tree:
    """Fitted tree; arrays are indexed by pre-order node id."""

    children_left: np.ndarray
    children_right: np.ndarray
    feature: np.ndarray
    threshold: np.ndarray
    impurity: np.ndarray
    weighted_n: np.ndarray
    raw_n: np.ndarray
    value: np.ndarray
    depth: np.ndarray
    n_classes: int

    @property
    def n_nodes(self):
        return int(len(self.feature))

    @property
    def is_leaf(self):
        return self.feature < 0

    @property
    def n_leaves(self):
        return int(np.count_nonzero(self.is_leaf))

    @property
    def max_depth(self):
        return int(self.depth.max()) if self.n_nodes else 0

    def apply(self, X, backend=None):
        if backend is None:
            from . import backend
        X = _as_matrix(X)
        return backend.apply_tree(self.children_left, self.children_right,
                                  self.feature, self.threshold, X)

    def predict_proba(self, X, backend=None):
        if self.n_classes <= 0:
            raise ValueError("probability output needs a classification tree")
        leaves = self.apply(X, backend=backend)
        counts = self.value[leaves]
        totals = counts.sum(axis=1, keepdims=True)
        totals[totals == 0.0] = 1.0
        return counts / totals

    def predict(self, X, backend=None):
        leaves = self.apply(X, backend=backend)
        if self.n_classes > 0:
            # argmax keeps the lowest class index on ties
            return np.argmax(self.value[leaves], axis=1).astype(np.int64)
        return self.value[leaves, 0]

    def decision_path_lengths(self, X, backend=None):
        leaves = self.apply(X, backend=backend)
        return self.depth[leaves]

    def to_jsonable(self):
        return {
            "n_classes": int(self.n_classes),
            "children_left": self.children_left.tolist(),
            "children_right": self.children_right.tolist(),
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "impurity": self.impurity.tolist(),
            "weighted_n": self.weighted_n.tolist(),
            "raw_n": self.raw_n.tolist(),
            "value": self.value.tolist(),
            "depth": self.depth.tolist(),
        }

    @classmethod
    def from_jsonable(cls, d):
        return cls(
            children_left=np.asarray(d["children_left"], dtype=np.int32),
            children_right=np.asarray(d["children_right"], dtype=np.int32),
            feature=np.asarray(d["feature"], dtype=np.int32),
            threshold=np.asarray(d["threshold"], dtype=np.float64),
            impurity=np.asarray(d["impurity"], dtype=np.float64),
            weighted_n=np.asarray(d["weighted_n"], dtype=np.float64),
            raw_n=np.asarray(d["raw_n"], dtype=np.int32),
            value=np.asarray(d["value"], dtype=np.float64),
            depth=np.asarray(d["depth"], dtype=np.int32),
            n_classes=int(d["n_classes"]),
        )


def grow_tree(X, y, *, n_classes=0, sample_weight=None, criterion="gini",
              splitter="best", max_depth=-1, min_samples_split=2,
              min_samples_leaf=1, max_features=None, seed=0, backend=None):
    """Fit a single tree.

    ``n_classes > 0`` selects classification (y holds class indices in
    [0, n_classes)); 0 selects regression.  ``max_features`` is a feature
    count, not a fraction; ``None`` means all features.  ``max_depth=-1``
    means unlimited.
    """
    if backend is None:
        from . import backend
    X = _as_matrix(X)
    n, p = X.shape
    if n == 0:
        raise ValueError("cannot grow a tree on an empty sample")
    classification = n_classes > 0
    if classification:
        y_cls = np.ascontiguousarray(y, dtype=np.int64)
        if y_cls.shape != (n,):
            raise ValueError("y has wrong shape")
        if y_cls.min() < 0 or y_cls.max() >= n_classes:
            raise ValueError("class labels out of range")
        y_reg = None
    else:
        y_reg = np.ascontiguousarray(y, dtype=np.float64)
        if y_reg.shape != (n,):
            raise ValueError("y has wrong shape")
        y_cls = None
    if sample_weight is None:
        w = np.ones(n, dtype=np.float64)
    else:
        w = np.ascontiguousarray(sample_weight, dtype=np.float64)
        if w.shape != (n,):
            raise ValueError("sample_weight has wrong shape")
        if np.any(w < 0.0) or not np.all(np.isfinite(w)):
            raise ValueError("sample weights must be finite and non-negative")
    crit = CRITERIA[criterion]
    split_kind = SPLITTERS[splitter]
    if split_kind == SPLITTERS["random"] and not classification:
        raise ValueError("random splitter is only wired up for classification")
    if not classification and crit in (CRITERIA["gini"], CRITERIA["entropy"]):
        raise ValueError("classification criterion on a regression tree")
    if classification and crit in (CRITERIA["mse"], CRITERIA["friedman_mse"]):
        raise ValueError("regression criterion on a classification tree")
    k = p if max_features is None else int(max_features)

    raw = backend.build_tree_raw(X, y_cls, y_reg, w, int(n_classes), crit,
                                 split_kind, int(max_depth),
                                 int(min_samples_split),
                                 int(min_samples_leaf), k, int(seed))
    return Tree(*raw, n_classes=int(n_classes))
