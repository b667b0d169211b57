"""Hyperparameter search strategies over a SearchSpace.

All four strategies maximize a black-box objective mapping a config
dict to a real score; callers negate objectives they want minimized.
"""

from .bayes import Surrogate, bayes_opt, expected_improvement
from .genetic import genetic_search
from .grid import grid_search
from .random_search import random_search
from .result import SearchError, SearchResult

__all__ = [
    "SearchError",
    "SearchResult",
    "Surrogate",
    "bayes_opt",
    "expected_improvement",
    "genetic_search",
    "grid_search",
    "random_search",
]
