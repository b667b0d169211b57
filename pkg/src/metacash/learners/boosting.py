"""Gradient boosting on the logistic loss with regression trees.

Binary problems train one stagewise model on the signed residuals; each
stage grows a regression tree (mse or Friedman improvement as the split
criterion) and then replaces every leaf value with a Newton step
sum(residual) / sum(p(1-p)) over the leaf's training rows.  Multiclass
wraps one binary model per class, one-vs-rest, ranked by raw logit.
"""

import numpy as np

from ..engine import grow_tree
from ..engine.tree import Tree

_EPS = 1e-12
_CLIP_LOGIT = 30.0


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -_CLIP_LOGIT, _CLIP_LOGIT)))


class _BinaryGB:
    """One boosted model for targets in {0,1}."""

    def __init__(self, learning_rate, criterion, n_estimators, max_depth,
                 min_samples_split, seed):
        self.learning_rate = float(learning_rate)
        self.criterion = criterion
        self.n_estimators = int(n_estimators)
        self.max_depth = int(max_depth)
        self.min_samples_split = int(min_samples_split)
        self.seed = int(seed)
        self.f0 = 0.0
        self.stages = []  # (tree, leaf_value per node id)

    def fit(self, X, y01):
        y = y01.astype(np.float64)
        pbar = min(max(float(np.mean(y)), _EPS), 1.0 - _EPS)
        self.f0 = float(np.log(pbar / (1.0 - pbar)))
        f = np.full(len(y), self.f0)
        self.stages = []
        for t in range(self.n_estimators):
            p = _sigmoid(f)
            residual = y - p
            if np.max(np.abs(residual)) < 1e-10:
                break
            tree = grow_tree(
                X, residual, n_classes=0, criterion=self.criterion,
                max_depth=self.max_depth,
                min_samples_split=self.min_samples_split,
                min_samples_leaf=1, seed=self.seed + t)
            leaves = tree.apply(X)
            hess = p * (1.0 - p)
            num = np.bincount(leaves, weights=residual, minlength=tree.n_nodes)
            den = np.bincount(leaves, weights=hess, minlength=tree.n_nodes)
            leaf_val = num / np.maximum(den, _EPS)
            leaf_val = np.clip(leaf_val, -4.0, 4.0)
            f = f + self.learning_rate * leaf_val[leaves]
            self.stages.append((tree, leaf_val))
        return self

    def decision(self, X):
        f = np.full(X.shape[0], self.f0)
        for tree, leaf_val in self.stages:
            f = f + self.learning_rate * leaf_val[tree.apply(X)]
        return f

    def state(self):
        return {
            "f0": self.f0,
            "stages": [[t.to_jsonable(), lv.tolist()] for t, lv in self.stages],
        }

    def load(self, d):
        self.f0 = float(d["f0"])
        self.stages = [(Tree.from_jsonable(t), np.asarray(lv))
                       for t, lv in d["stages"]]


class GradientBoosting:
    def __init__(self, learning_rate=0.1, criterion="friedman_mse",
                 n_estimators=100, max_depth=3, min_samples_split=2, seed=0):
        self.params = dict(learning_rate=float(learning_rate),
                           criterion=criterion,
                           n_estimators=int(n_estimators),
                           max_depth=int(max_depth),
                           min_samples_split=int(min_samples_split))
        self.seed = int(seed)
        self.models = []
        self.n_classes = 0

    def fit(self, X, y, n_classes, sample_weight=None):
        if sample_weight is not None and not np.allclose(sample_weight,
                                                         sample_weight[0]):
            raise ValueError("sample weights are not supported here")
        self.n_classes = int(n_classes)
        self.models = []
        if self.n_classes == 2:
            m = _BinaryGB(seed=self.seed, **self.params)
            m.fit(X, (y == 1).astype(np.float64))
            self.models.append(m)
        else:
            for k in range(self.n_classes):
                m = _BinaryGB(seed=self.seed + 100003 * k, **self.params)
                m.fit(X, (y == k).astype(np.float64))
                self.models.append(m)
        return self

    def decision(self, X):
        if self.n_classes == 2:
            f = self.models[0].decision(X)
            return np.column_stack([-f, f])
        return np.column_stack([m.decision(X) for m in self.models])

    def predict_proba(self, X):
        d = self.decision(X)
        p = _sigmoid(d)
        tot = p.sum(axis=1, keepdims=True)
        tot[tot == 0.0] = 1.0
        return p / tot

    def predict(self, X):
        return np.argmax(self.decision(X), axis=1).astype(np.int64)

    def state(self):
        return {
            "params": self.params,
            "seed": self.seed,
            "n_classes": self.n_classes,
            "models": [m.state() for m in self.models],
        }

    @classmethod
    def from_state(cls, d):
        obj = cls(seed=d["seed"], **d["params"])
        obj.n_classes = d["n_classes"]
        obj.models = []
        for k, ms in enumerate(d["models"]):
            seed = obj.seed if obj.n_classes == 2 else obj.seed + 100003 * k
            m = _BinaryGB(seed=seed, **obj.params)
            m.load(ms)
            obj.models.append(m)
        return obj
