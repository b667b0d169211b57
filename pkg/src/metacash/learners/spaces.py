"""Hyperparameter spaces for the eight classification algorithms.

Integer bounds convention: a printed range whose upper end is one of the
sentinel values 11/21/501 is inclusive-exclusive (so [1, 21] means the
integers 1..20); every other integer range is inclusive on both ends.
Each dimension records its effective inclusive bounds.
"""

from dataclasses import dataclass

import numpy as np

LOGISTIC_REGRESSION = "LOGISTIC_REGRESSION"
DECISION_TREE = "DECISION_TREE"
SVM = "SVM"
SGD_CLASSIFIER = "SGD_CLASSIFIER"
RANDOM_FOREST = "RANDOM_FOREST"
EXTRA_TREES = "EXTRA_TREES"
GRADIENT_BOOSTING = "GRADIENT_BOOSTING"
ADABOOST = "ADABOOST"

ALGORITHMS = (
    LOGISTIC_REGRESSION,
    DECISION_TREE,
    SVM,
    SGD_CLASSIFIER,
    RANDOM_FOREST,
    EXTRA_TREES,
    GRADIENT_BOOSTING,
    ADABOOST,
)

REAL = "continuous"
INT = "integer"
CAT = "categorical"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Dimension:
    """One search-space axis.

    ``condition`` is (other_dimension_name, allowed_value): the dimension
    exists in a config only when the other dimension takes that value.
    """

    name: str
    kind: str
    low: float = 0.0
    high: float = 0.0
    log: bool = False
    choices: tuple = ()
    condition: tuple = ()

    def __post_init__(self):
        if self.kind in (REAL, INT):
            if not (np.isfinite(self.low) and np.isfinite(self.high)):
                raise ConfigError("bounds must be finite: %s" % self.name)
            if self.low > self.high:
                raise ConfigError("bounds out of order: %s" % self.name)
            if self.log and self.low <= 0:
                raise ConfigError(
                    "log dimension needs positive bounds: %s" % self.name)

    def contains(self, value):
        if self.kind == CAT:
            return any(value == c and type(value) is type(c)
                       for c in self.choices)
        if self.kind == INT:
            return (isinstance(value, (int, np.integer))
                    and not isinstance(value, bool)
                    and self.low <= value <= self.high)
        return (isinstance(value, (int, float, np.floating))
                and not isinstance(value, bool)
                and self.low <= float(value) <= self.high)

    def sample(self, rng):
        if self.kind == CAT:
            return self.choices[int(rng.integers(len(self.choices)))]
        if self.kind == INT:
            return int(rng.integers(int(self.low), int(self.high) + 1))
        if self.log:
            return float(np.exp(rng.uniform(np.log(self.low),
                                            np.log(self.high))))
        return float(rng.uniform(self.low, self.high))


@dataclass(frozen=True)
class SearchSpace:
    algorithm: str
    dimensions: tuple

    def __post_init__(self):
        names = [d.name for d in self.dimensions]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate dimension names")
        by_name = {d.name: d for d in self.dimensions}
        for d in self.dimensions:
            if d.condition:
                parent, _ = d.condition
                if parent not in by_name:
                    raise ConfigError("condition on unknown dimension %r" % parent)
                if by_name[parent].condition:
                    raise ConfigError("chained conditions are not supported")

    def dimension(self, name):
        for d in self.dimensions:
            if d.name == name:
                return d
        raise KeyError(name)

    def active_dimensions(self, values):
        """Dimensions present given the unconditional assignments made so far."""
        out = []
        for d in self.dimensions:
            if not d.condition:
                out.append(d)
            else:
                parent, needed = d.condition
                if values.get(parent) == needed:
                    out.append(d)
        return out

    def sample(self, rng):
        """Draw one valid configuration (uniform per dimension,
        log-uniform where flagged)."""
        values = {}
        for d in self.dimensions:
            if not d.condition:
                values[d.name] = d.sample(rng)
        for d in self.dimensions:
            if d.condition:
                parent, needed = d.condition
                if values.get(parent) == needed:
                    values[d.name] = d.sample(rng)
        return values

    def validate(self, values):
        """Raise ConfigError unless ``values`` is exactly one point of this
        space (correct keys, bounds, and conditional presence)."""
        expected = {d.name for d in self.active_dimensions(values)}
        got = set(values)
        missing = expected - got
        extra = got - expected
        if missing:
            raise ConfigError("missing hyperparameters: %s" % sorted(missing))
        if extra:
            raise ConfigError("unexpected hyperparameters: %s" % sorted(extra))
        for d in self.dimensions:
            if d.name in values and not d.contains(values[d.name]):
                raise ConfigError(
                    "value %r outside dimension %s" % (values[d.name], d.name))


def _lr_space():
    return SearchSpace(LOGISTIC_REGRESSION, (
        Dimension("C", REAL, 1e-10, 10.0, log=True),
        Dimension("penalty", CAT, choices=("l2", "l1")),
        Dimension("fit_intercept", CAT, choices=(True, False)),
    ))


def _dt_space():
    return SearchSpace(DECISION_TREE, (
        Dimension("max_features", REAL, 0.1, 0.9),
        Dimension("min_samples_leaf", INT, 1, 20),
        Dimension("min_samples_split", INT, 2, 20),
        Dimension("criterion", CAT, choices=("entropy", "gini")),
    ))


def _svm_space():
    return SearchSpace(SVM, (
        Dimension("complexity", REAL, 1e-10, 500.0, log=True),
        Dimension("kernel", CAT, choices=("poly", "rbf")),
        Dimension("coef0", REAL, 0.0, 10.0),
        Dimension("gamma", REAL, 1e-3, 1.01, log=True),
        Dimension("degree", INT, 2, 3, condition=("kernel", "poly")),
    ))


def _sgd_space():
    return SearchSpace(SGD_CLASSIFIER, (
        Dimension("loss", CAT,
                  choices=("hinge", "perceptron", "log", "squared_hinge")),
        Dimension("penalty", CAT, choices=("l2", "l1", "elasticnet")),
        Dimension("learning_rate", CAT,
                  choices=("const", "opt", "invscaling")),
        Dimension("fit_intercept", CAT, choices=(True, False)),
        Dimension("l1_ratio", REAL, 0.0, 1.0,
                  condition=("penalty", "elasticnet")),
        Dimension("eta0", REAL, 0.0, 5.0),
    ))


def _forest_space(algorithm):
    return SearchSpace(algorithm, (
        Dimension("bootstrap", CAT, choices=(True, False)),
        Dimension("max_features", REAL, 0.1, 0.9),
        Dimension("min_samples_leaf", INT, 1, 20),
        Dimension("min_samples_split", INT, 2, 20),
        Dimension("imputation", CAT, choices=("mean", "median", "mode")),
        Dimension("criterion", CAT, choices=("entropy", "gini")),
    ))


def _gb_space():
    return SearchSpace(GRADIENT_BOOSTING, (
        Dimension("learning_rate", REAL, 0.01, 1.0),
        Dimension("criterion", CAT, choices=("friedman_mse", "mse")),
        Dimension("n_estimators", INT, 50, 500),
        Dimension("max_depth", INT, 1, 10),
        Dimension("min_samples_split", INT, 2, 20),
    ))


def _ada_space():
    return SearchSpace(ADABOOST, (
        Dimension("algorithm", CAT, choices=("SAMME", "SAMME.R")),
        Dimension("n_estimators", INT, 50, 500),
        Dimension("learning_rate", REAL, 0.01, 2.0, log=True),
        Dimension("max_depth", INT, 1, 10),
    ))


_SPACES = {
    LOGISTIC_REGRESSION: _lr_space,
    DECISION_TREE: _dt_space,
    SVM: _svm_space,
    SGD_CLASSIFIER: _sgd_space,
    RANDOM_FOREST: lambda: _forest_space(RANDOM_FOREST),
    EXTRA_TREES: lambda: _forest_space(EXTRA_TREES),
    GRADIENT_BOOSTING: _gb_space,
    ADABOOST: _ada_space,
}


def hp_space(algorithm):
    """The declared search space for one of the eight algorithms."""
    if algorithm not in _SPACES:
        raise ConfigError("unknown algorithm %r (expected one of %s)"
                          % (algorithm, ", ".join(ALGORITHMS)))
    return _SPACES[algorithm]()
