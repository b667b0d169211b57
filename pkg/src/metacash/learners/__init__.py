"""The eight base classifiers, their search spaces, and pipeline assembly."""

from .spaces import (ADABOOST, ALGORITHMS, DECISION_TREE, EXTRA_TREES,
                     GRADIENT_BOOSTING, LOGISTIC_REGRESSION, RANDOM_FOREST,
                     SGD_CLASSIFIER, SVM, ConfigError, Dimension,
                     SearchSpace, hp_space)
from .model import (PipelineModel, fit_pipeline, load_model,
                    model_document, model_from_document, save_model)
from .encoding import FeatureEncoder, MissingValueError, SchemaError

__all__ = [
    "ADABOOST", "ALGORITHMS", "DECISION_TREE", "EXTRA_TREES",
    "GRADIENT_BOOSTING", "LOGISTIC_REGRESSION", "RANDOM_FOREST",
    "SGD_CLASSIFIER", "SVM", "ConfigError", "Dimension", "SearchSpace",
    "hp_space", "PipelineModel", "fit_pipeline", "load_model",
    "model_document", "model_from_document", "save_model",
    "FeatureEncoder", "MissingValueError", "SchemaError",
]
