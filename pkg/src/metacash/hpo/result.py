"""Common result type for the search strategies."""

from dataclasses import dataclass, field


class SearchError(ValueError):
    pass


@dataclass
class SearchResult:
    strategy: str
    best_config: dict
    best_score: float
    history: list           # ordered (config, score) pairs
    evaluations_used: int
    seed: int
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.evaluations_used != len(self.history):
            raise SearchError("evaluation count does not match history")
        if self.history:
            top = max(score for _, score in self.history)
            if self.best_score != top:
                raise SearchError("best_score must be the history maximum")

    def to_jsonable(self):
        return {
            "strategy": self.strategy,
            "best_config": dict(self.best_config),
            "best_score": self.best_score,
            "history": [{"config": dict(c), "score": s}
                        for c, s in self.history],
            "evaluations_used": self.evaluations_used,
            "seed": self.seed,
            "notes": dict(self.notes),
        }
