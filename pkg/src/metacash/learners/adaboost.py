"""AdaBoost with depth-capped trees: discrete SAMME and real SAMME.R.

SAMME reweights by exponentiated vote error and predicts by weighted
discrete votes.  SAMME.R uses each tree's leaf class distributions,
scoring with (c-1) * (log p_k - mean_j log p_j) and updating weights from
the coded-label inner product with log-probabilities.
"""

import numpy as np

from ..engine import grow_tree
from ..engine.tree import Tree

_P_CLIP = 1e-10


class AdaBoost:
    def __init__(self, algorithm="SAMME.R", n_estimators=50,
                 learning_rate=1.0, max_depth=1, seed=0):
        if algorithm not in ("SAMME", "SAMME.R"):
            raise ValueError("unknown boosting variant %r" % algorithm)
        self.algorithm = algorithm
        self.n_estimators = int(n_estimators)
        self.learning_rate = float(learning_rate)
        self.max_depth = int(max_depth)
        self.seed = int(seed)
        self.trees = []
        self.alphas = []
        self.n_classes = 0

    def _grow(self, X, y, w, t):
        return grow_tree(X, y, n_classes=self.n_classes, sample_weight=w,
                         criterion="gini", max_depth=self.max_depth,
                         seed=self.seed + t)

    def fit(self, X, y, n_classes, sample_weight=None):
        self.n_classes = int(n_classes)
        c = self.n_classes
        n = X.shape[0]
        w = (np.ones(n) / n if sample_weight is None
             else sample_weight / np.sum(sample_weight))
        self.trees, self.alphas = [], []
        for t in range(self.n_estimators):
            tree = self._grow(X, y, w, t)
            if self.algorithm == "SAMME":
                pred = tree.predict(X)
                miss = (pred != y).astype(np.float64)
                err = float(np.sum(w * miss))
                if err <= 0.0:
                    # perfect member dominates; keep it and stop
                    self.trees.append(tree)
                    self.alphas.append(self.learning_rate
                                       * (np.log(1e12) + np.log(c - 1.0)))
                    break
                if err >= 1.0 - 1.0 / c:
                    if not self.trees:
                        self.trees.append(tree)
                        self.alphas.append(1.0)
                    break
                alpha = self.learning_rate * (np.log((1.0 - err) / err)
                                              + np.log(c - 1.0))
                self.trees.append(tree)
                self.alphas.append(float(alpha))
                w = w * np.exp(alpha * miss)
                w = w / np.sum(w)
            else:
                proba = np.clip(tree.predict_proba(X), _P_CLIP, 1.0)
                log_p = np.log(proba)
                coded = np.full((n, c), -1.0 / (c - 1.0))
                coded[np.arange(n), y] = 1.0
                self.trees.append(tree)
                self.alphas.append(1.0)
                upd = (-self.learning_rate * (c - 1.0) / c
                       * np.sum(coded * log_p, axis=1))
                w = w * np.exp(upd)
                tot = float(np.sum(w))
                if not np.isfinite(tot) or tot <= 0.0:
                    break
                w = w / tot
        return self

    def decision(self, X):
        c = self.n_classes
        score = np.zeros((X.shape[0], c))
        if self.algorithm == "SAMME":
            for tree, alpha in zip(self.trees, self.alphas):
                pred = tree.predict(X)
                score[np.arange(X.shape[0]), pred] += alpha
        else:
            for tree in self.trees:
                proba = np.clip(tree.predict_proba(X), _P_CLIP, 1.0)
                log_p = np.log(proba)
                score += (c - 1.0) * (log_p - log_p.mean(axis=1, keepdims=True))
        return score

    def predict(self, X):
        return np.argmax(self.decision(X), axis=1).astype(np.int64)

    def predict_proba(self, X):
        d = self.decision(X)
        d = d - d.max(axis=1, keepdims=True)
        e = np.exp(d)
        return e / e.sum(axis=1, keepdims=True)

    def state(self):
        return {
            "algorithm": self.algorithm,
            "n_estimators": self.n_estimators,
            "learning_rate": self.learning_rate,
            "max_depth": self.max_depth,
            "seed": self.seed,
            "n_classes": self.n_classes,
            "alphas": [float(a) for a in self.alphas],
            "trees": [t.to_jsonable() for t in self.trees],
        }

    @classmethod
    def from_state(cls, d):
        obj = cls(algorithm=d["algorithm"], n_estimators=d["n_estimators"],
                  learning_rate=d["learning_rate"], max_depth=d["max_depth"],
                  seed=d["seed"])
        obj.n_classes = d["n_classes"]
        obj.alphas = list(d["alphas"])
        obj.trees = [Tree.from_jsonable(t) for t in d["trees"]]
        return obj
