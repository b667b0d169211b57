"""Pipeline assembly: config -> (encoder, optional scaler, learner).

fit_pipeline validates the config against the algorithm's declared space,
fits the feature encoder (imputing by the config's ``imputation`` choice
where the space declares one; the other algorithms reject missing values),
standardizes inputs for the margin-based learners, and trains the
classifier.  Models serialize to a self-describing JSON document and
round-trip exactly.
"""

import json
from dataclasses import dataclass

import numpy as np

from .adaboost import AdaBoost
from .boosting import GradientBoosting
from .cart import DecisionTree
from .encoding import FeatureEncoder, Standardizer
from .forest import Forest
from .linear import LogisticRegression, SGDClassifier
from .svm import SVMClassifier
from . import spaces
from .spaces import (ADABOOST, DECISION_TREE, EXTRA_TREES,
                     GRADIENT_BOOSTING, LOGISTIC_REGRESSION, RANDOM_FOREST,
                     SGD_CLASSIFIER, SVM)

MODEL_FORMAT = "metacash-model/1"
FOREST_N_TREES = 100

STANDARDIZED = frozenset({LOGISTIC_REGRESSION, SGD_CLASSIFIER, SVM})

# algorithms whose space does not expose an imputation choice still need
# finite inputs, so they fall back to mean imputation


def _build_learner(algorithm, cfg, seed):
    if algorithm == LOGISTIC_REGRESSION:
        return LogisticRegression(C=cfg["C"], penalty=cfg["penalty"],
                                  fit_intercept=cfg["fit_intercept"],
                                  seed=seed)
    if algorithm == DECISION_TREE:
        return DecisionTree(criterion=cfg["criterion"],
                            max_features=cfg["max_features"],
                            min_samples_leaf=cfg["min_samples_leaf"],
                            min_samples_split=cfg["min_samples_split"],
                            seed=seed)
    if algorithm == SVM:
        return SVMClassifier(complexity=cfg["complexity"],
                             kernel=cfg["kernel"], coef0=cfg["coef0"],
                             gamma=cfg["gamma"],
                             degree=cfg.get("degree", 3), seed=seed)
    if algorithm == SGD_CLASSIFIER:
        return SGDClassifier(loss=cfg["loss"], penalty=cfg["penalty"],
                             learning_rate=cfg["learning_rate"],
                             fit_intercept=cfg["fit_intercept"],
                             l1_ratio=cfg.get("l1_ratio", 0.15),
                             eta0=cfg["eta0"], seed=seed)
    if algorithm in (RANDOM_FOREST, EXTRA_TREES):
        return Forest(n_trees=FOREST_N_TREES,
                      extra=(algorithm == EXTRA_TREES),
                      bootstrap=cfg["bootstrap"],
                      criterion=cfg["criterion"],
                      max_features=cfg["max_features"],
                      min_samples_leaf=cfg["min_samples_leaf"],
                      min_samples_split=cfg["min_samples_split"], seed=seed)
    if algorithm == GRADIENT_BOOSTING:
        return GradientBoosting(learning_rate=cfg["learning_rate"],
                                criterion=cfg["criterion"],
                                n_estimators=cfg["n_estimators"],
                                max_depth=cfg["max_depth"],
                                min_samples_split=cfg["min_samples_split"],
                                seed=seed)
    if algorithm == ADABOOST:
        return AdaBoost(algorithm=cfg["algorithm"],
                        n_estimators=cfg["n_estimators"],
                        learning_rate=cfg["learning_rate"],
                        max_depth=cfg["max_depth"], seed=seed)
    raise spaces.ConfigError("unknown algorithm %r" % algorithm)


_LEARNER_CLASSES = {
    LOGISTIC_REGRESSION: LogisticRegression,
    DECISION_TREE: DecisionTree,
    SVM: SVMClassifier,
    SGD_CLASSIFIER: SGDClassifier,
    RANDOM_FOREST: Forest,
    EXTRA_TREES: Forest,
    GRADIENT_BOOSTING: GradientBoosting,
    ADABOOST: AdaBoost,
}


@dataclass
class PipelineModel:
    algorithm: str
    config: dict
    seed: int
    encoder: FeatureEncoder
    scaler: object
    learner: object
    classes: tuple

    @property
    def n_classes(self):
        return len(self.classes)

    def _matrix(self, ds, rows=None):
        X = self.encoder.transform(ds, rows=rows)
        if self.scaler is not None:
            X = self.scaler.transform(X)
        return X

    def predict(self, ds, rows=None):
        """Dense class indices for the given rows of a schema-matching
        dataset."""
        return self.learner.predict(self._matrix(ds, rows))

    def predict_matrix(self, X):
        if self.scaler is not None:
            X = self.scaler.transform(X)
        return self.learner.predict(X)


def fit_pipeline(algorithm, config, train_ds, seed=0):
    """Train one (algorithm, config) pipeline on a dataset view."""
    space = spaces.hp_space(algorithm)
    space.validate(config)
    if train_ds.n < 1 or train_ds.c < 2:
        raise ValueError("degenerate training data")
    # imputation is a hyperparameter only where the space declares one
    # (the forests); every other algorithm refuses missing values, and a
    # pipeline on incomplete data fails rather than silently filling in
    encoder = FeatureEncoder(imputation=config.get("imputation")).fit(train_ds)
    X = encoder.transform(train_ds)
    scaler = None
    if algorithm in STANDARDIZED:
        scaler = Standardizer().fit(X)
        X = scaler.transform(X)
    learner = _build_learner(algorithm, config, int(seed))
    learner.fit(X, train_ds.labels, n_classes=train_ds.c)
    return PipelineModel(algorithm=algorithm, config=dict(config),
                         seed=int(seed), encoder=encoder, scaler=scaler,
                         learner=learner, classes=train_ds.classes)


def model_document(model):
    return {
        "format": MODEL_FORMAT,
        "algorithm": model.algorithm,
        "config": model.config,
        "seed": model.seed,
        "classes": list(model.classes),
        "encoder": model.encoder.state(),
        "scaler": model.scaler.state() if model.scaler is not None else None,
        "learner": model.learner.state(),
    }


def model_from_document(doc):
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError("unsupported model format %r" % doc.get("format"))
    algorithm = doc["algorithm"]
    learner = _LEARNER_CLASSES[algorithm].from_state(doc["learner"])
    scaler = (Standardizer.from_state(doc["scaler"])
              if doc["scaler"] is not None else None)
    return PipelineModel(algorithm=algorithm, config=doc["config"],
                         seed=int(doc["seed"]),
                         encoder=FeatureEncoder.from_state(doc["encoder"]),
                         scaler=scaler, learner=learner,
                         classes=tuple(doc["classes"]))


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_document(model), fh)


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_document(json.load(fh))
