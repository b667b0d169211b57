"""Meta-knowledge base: durable store of dataset meta-features and
pipeline evaluation records, plus the builder that fills it."""

from .build import (create_meta_kb, engine_tag, replay_experiment,
                    run_experiment, sample_pipeline_plan)
from .store import (IntegrityError, KBError, KnowledgeBase,
                    stable_experiment_view)

__all__ = [
    "IntegrityError",
    "KBError",
    "KnowledgeBase",
    "create_meta_kb",
    "engine_tag",
    "replay_experiment",
    "run_experiment",
    "sample_pipeline_plan",
    "stable_experiment_view",
]
