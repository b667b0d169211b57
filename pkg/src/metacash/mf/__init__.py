"""Meta-feature extraction.

`extract_all` characterizes a dataset as a fixed-order vector of 73
values across six families (simple, statistical, information-theoretic,
landmarking, model-based and complexity).  Entries a dataset cannot
support (no numeric attributes, degenerate classes, and so on) are
None rather than an error, and a failing family never aborts the
others; diagnostics explain anything that was skipped.
"""

from dataclasses import dataclass, field

import numpy as np

from .catalogue import CATALOGUE, CATALOGUE_VERSION, FAMILIES
from .complexity import extract_complexity
from .infotheo import extract_info_theoretic
from .landmarking import extract_landmarking
from .modelbased import extract_model_based
from .simple import extract_simple
from .statistical import extract_statistical

__all__ = [
    "CATALOGUE",
    "CATALOGUE_VERSION",
    "FAMILIES",
    "MetaFeatureVector",
    "extract_all",
]


@dataclass
class MetaFeatureVector:
    dataset_id: str
    entries: dict
    catalogue_version: str = CATALOGUE_VERSION
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if tuple(self.entries) != CATALOGUE:
            raise ValueError("entries must follow the catalogue order")

    def values_array(self):
        """Vector in catalogue order, NaN where a value is missing."""
        return np.array([np.nan if v is None else float(v)
                         for v in self.entries.values()])

    @property
    def n_missing(self):
        return sum(1 for v in self.entries.values() if v is None)

    def to_jsonable(self):
        return {
            "dataset_id": self.dataset_id,
            "catalogue_version": self.catalogue_version,
            "entries": dict(self.entries),
            "diagnostics": dict(self.diagnostics),
        }

    @classmethod
    def from_jsonable(cls, d):
        entries = {name: d["entries"].get(name) for name in CATALOGUE}
        return cls(dataset_id=d["dataset_id"], entries=entries,
                   catalogue_version=d.get("catalogue_version",
                                           CATALOGUE_VERSION),
                   diagnostics=dict(d.get("diagnostics", {})))


def _run_family(family, extractor, args, entries, diagnostics, names):
    try:
        values, diag = extractor(*args)
    except Exception as exc:
        for name in names:
            entries[name] = None
        diagnostics[family + "_failed"] = "%s: %s" % (type(exc).__name__, exc)
        return
    for name in names:
        entries[name] = values.get(name)
    for key, val in diag.items():
        diagnostics[key] = val


def extract_all(ds, seed=0):
    """Full meta-feature vector for a Dataset."""
    extractors = {
        "simple": (extract_simple, (ds,)),
        "statistical": (extract_statistical, (ds,)),
        "info_theoretic": (extract_info_theoretic, (ds,)),
        "landmarking": (extract_landmarking, (ds, seed)),
        "model_based": (extract_model_based, (ds, seed)),
        "complexity": (extract_complexity, (ds,)),
    }
    entries = {}
    diagnostics = {}
    for family, names in FAMILIES:
        fn, args = extractors[family]
        _run_family(family, fn, args, entries, diagnostics, names)
    entries = {name: entries[name] for name in CATALOGUE}
    return MetaFeatureVector(dataset_id=ds.id, entries=entries,
                             diagnostics=diagnostics)
