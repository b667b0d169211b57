"""Single decision-tree classifier over the engine kernel."""

import numpy as np

from ..engine import grow_tree
from ..engine.tree import Tree


def resolve_max_features(fraction, p):
    """Fraction-of-features to a count: floor, at least 1."""
    if fraction is None:
        return p
    return max(1, int(float(fraction) * p))


class DecisionTree:
    def __init__(self, criterion="gini", max_features=None,
                 min_samples_leaf=1, min_samples_split=2, max_depth=-1,
                 splitter="best", seed=0):
        self.criterion = criterion
        self.max_features = max_features
        self.min_samples_leaf = int(min_samples_leaf)
        self.min_samples_split = int(min_samples_split)
        self.max_depth = int(max_depth)
        self.splitter = splitter
        self.seed = int(seed)
        self.tree = None
        self.n_classes = 0

    def fit(self, X, y, n_classes, sample_weight=None):
        self.n_classes = int(n_classes)
        k = resolve_max_features(self.max_features, X.shape[1])
        self.tree = grow_tree(
            X, y, n_classes=self.n_classes, sample_weight=sample_weight,
            criterion=self.criterion, splitter=self.splitter,
            max_depth=self.max_depth,
            min_samples_split=self.min_samples_split,
            min_samples_leaf=self.min_samples_leaf,
            max_features=k, seed=self.seed)
        return self

    def predict_proba(self, X):
        return self.tree.predict_proba(X)

    def predict(self, X):
        return self.tree.predict(X)

    def state(self):
        return {
            "criterion": self.criterion,
            "max_features": self.max_features,
            "min_samples_leaf": self.min_samples_leaf,
            "min_samples_split": self.min_samples_split,
            "max_depth": self.max_depth,
            "splitter": self.splitter,
            "seed": self.seed,
            "n_classes": self.n_classes,
            "tree": self.tree.to_jsonable() if self.tree is not None else None,
        }

    @classmethod
    def from_state(cls, d):
        obj = cls(criterion=d["criterion"], max_features=d["max_features"],
                  min_samples_leaf=d["min_samples_leaf"],
                  min_samples_split=d["min_samples_split"],
                  max_depth=d["max_depth"], splitter=d["splitter"],
                  seed=d["seed"])
        obj.n_classes = d["n_classes"]
        if d["tree"] is not None:
            obj.tree = Tree.from_jsonable(d["tree"])
        return obj
