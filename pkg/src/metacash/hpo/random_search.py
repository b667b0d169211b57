"""Random search: a fixed budget of independent draws from the space.

The running best is updated on ties (later draw wins at equal score),
matching a greater-or-equal comparison against the global best.
"""

import numpy as np

from .result import SearchError, SearchResult


def random_search(space, objective, budget, seed=0):
    if budget < 1:
        raise SearchError("budget must be >= 1")
    rng = np.random.default_rng(seed)
    history = []
    best_cfg = None
    best_score = -np.inf
    for _ in range(budget):
        cfg = space.sample(rng)
        score = float(objective(cfg))
        history.append((cfg, score))
        if best_cfg is None or score >= best_score:
            best_cfg, best_score = cfg, score
    return SearchResult(strategy="random", best_config=best_cfg,
                        best_score=best_score, history=history,
                        evaluations_used=len(history), seed=int(seed))
