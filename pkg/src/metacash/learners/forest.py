"""Bagged tree ensembles: random forest and extremely randomized trees.

Tree t is grown with seed ``seed + t``, so a one-tree forest without
bootstrap reproduces the single decision tree grown with the same seed.
Prediction averages the per-tree leaf class distributions; argmax breaks
ties toward the lowest class index.
"""

import numpy as np

from ..engine import grow_tree
from ..engine.tree import Tree
from .cart import resolve_max_features


class Forest:
    def __init__(self, n_trees=100, extra=False, bootstrap=True,
                 criterion="gini", max_features=None, min_samples_leaf=1,
                 min_samples_split=2, seed=0):
        self.n_trees = int(n_trees)
        self.extra = bool(extra)
        self.bootstrap = bool(bootstrap)
        self.criterion = criterion
        self.max_features = max_features
        self.min_samples_leaf = int(min_samples_leaf)
        self.min_samples_split = int(min_samples_split)
        self.seed = int(seed)
        self.trees = []
        self.n_classes = 0

    def fit(self, X, y, n_classes, sample_weight=None):
        self.n_classes = int(n_classes)
        n, p = X.shape
        k = resolve_max_features(self.max_features, p)
        splitter = "random" if self.extra else "best"
        if sample_weight is None:
            sample_weight = np.ones(n)
        self.trees = []
        for t in range(self.n_trees):
            if self.bootstrap:
                rng = np.random.default_rng([self.seed, t])
                rows = rng.integers(0, n, size=n)
                Xt, yt, wt = X[rows], y[rows], sample_weight[rows]
            else:
                Xt, yt, wt = X, y, sample_weight
            tree = grow_tree(
                Xt, yt, n_classes=self.n_classes, sample_weight=wt,
                criterion=self.criterion, splitter=splitter,
                min_samples_split=self.min_samples_split,
                min_samples_leaf=self.min_samples_leaf,
                max_features=k, seed=self.seed + t)
            self.trees.append(tree)
        return self

    def predict_proba(self, X):
        acc = np.zeros((X.shape[0], self.n_classes))
        for tree in self.trees:
            acc += tree.predict_proba(X)
        return acc / len(self.trees)

    def predict(self, X):
        return np.argmax(self.predict_proba(X), axis=1).astype(np.int64)

    def state(self):
        return {
            "n_trees": self.n_trees,
            "extra": self.extra,
            "bootstrap": self.bootstrap,
            "criterion": self.criterion,
            "max_features": self.max_features,
            "min_samples_leaf": self.min_samples_leaf,
            "min_samples_split": self.min_samples_split,
            "seed": self.seed,
            "n_classes": self.n_classes,
            "trees": [t.to_jsonable() for t in self.trees],
        }

    @classmethod
    def from_state(cls, d):
        obj = cls(n_trees=d["n_trees"], extra=d["extra"],
                  bootstrap=d["bootstrap"], criterion=d["criterion"],
                  max_features=d["max_features"],
                  min_samples_leaf=d["min_samples_leaf"],
                  min_samples_split=d["min_samples_split"], seed=d["seed"])
        obj.n_classes = d["n_classes"]
        obj.trees = [Tree.from_jsonable(t) for t in d["trees"]]
        return obj
