"""Append-only experiment store.

Layout under one directory: ``manifest`` (JSON build parameters),
``datasets.ndjson``, ``pipelines.ndjson``, ``experiments.ndjson``.
Every record is one canonical-JSON line; floats round-trip exactly
through their shortest decimal form, so a reloaded store reproduces
the original bytes.  Records are never rewritten: a later experiment
line for the same (dataset, pipeline) supersedes the earlier one.
"""

import json
import os

import numpy as np

from ..utils import canonical_json

KB_FORMAT = "metacash-kb/1"
MANIFEST_NAME = "manifest"
DATASETS_NAME = "datasets.ndjson"
PIPELINES_NAME = "pipelines.ndjson"
EXPERIMENTS_NAME = "experiments.ndjson"

# fields that vary run to run even when the computation is identical
VOLATILE_EXPERIMENT_FIELDS = ("timestamp", "runtime_s", "memory_bytes")

_EXPERIMENT_KEYS = {
    "experiment_id", "dataset_id", "pipeline_id", "algorithm", "config",
    "status", "scores", "metric_means", "error", "cv", "seed",
    "timestamp", "runtime_s", "memory_bytes", "engine",
}


class KBError(RuntimeError):
    pass


class IntegrityError(KBError):
    pass


def stable_experiment_view(record):
    """The record minus wall-clock fields, for run-to-run comparisons."""
    out = {k: v for k, v in record.items()
           if k not in VOLATILE_EXPERIMENT_FIELDS}
    scores = record.get("scores")
    if scores is not None:
        out["scores"] = {k: v for k, v in scores.items()
                         if k not in ("runtime_s", "memory_bytes")}
    return out


def _append_line(path, obj):
    with open(path, "a", encoding="utf-8") as f:
        f.write(canonical_json(obj) + "\n")
        f.flush()
        os.fsync(f.fileno())


def _atomic_write(path, text):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(text)
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)


def _read_ndjson(path):
    """Parse a line-delimited file, truncating a torn final line left by
    a crash mid-append (complete lines always end in a newline)."""
    if not os.path.exists(path):
        return []
    with open(path, "rb") as f:
        data = f.read()
    records = []
    offset = 0
    for line in data.splitlines(keepends=True):
        text = line.strip()
        if text:
            try:
                records.append(json.loads(text))
            except json.JSONDecodeError:
                if offset + len(line) == len(data) and not line.endswith(b"\n"):
                    with open(path, "r+b") as f:
                        f.truncate(offset)
                    return records
                raise KBError("corrupt record in %s" % path)
        offset += len(line)
    return records


class KnowledgeBase:
    """In-memory view over the on-disk log, with durable appends."""

    def __init__(self, root, manifest):
        self.root = root
        self.manifest = manifest
        self.datasets = {}
        self.pipelines = {}
        self.experiments = []
        self._latest = {}            # (dataset_id, pipeline_id) -> index

    # -- lifecycle -----------------------------------------------------

    @classmethod
    def create(cls, root, params):
        os.makedirs(root, exist_ok=True)
        manifest_path = os.path.join(root, MANIFEST_NAME)
        if os.path.exists(manifest_path):
            raise KBError("a knowledge base already exists at %s" % root)
        manifest = dict(params)
        manifest["format"] = KB_FORMAT
        _atomic_write(manifest_path, canonical_json(manifest) + "\n")
        return cls(root, manifest)

    @classmethod
    def open(cls, root):
        manifest_path = os.path.join(root, MANIFEST_NAME)
        if not os.path.exists(manifest_path):
            raise KBError("no knowledge base at %s" % root)
        with open(manifest_path, encoding="utf-8") as f:
            manifest = json.load(f)
        if manifest.get("format") != KB_FORMAT:
            raise KBError("unsupported store format %r" % manifest.get("format"))
        kb = cls(root, manifest)
        for rec in _read_ndjson(os.path.join(root, DATASETS_NAME)):
            kb.datasets[rec["dataset_id"]] = rec
        for rec in _read_ndjson(os.path.join(root, PIPELINES_NAME)):
            kb.pipelines[rec["pipeline_id"]] = rec
        for rec in _read_ndjson(os.path.join(root, EXPERIMENTS_NAME)):
            kb._check_references(rec)
            kb._index_experiment(rec)
        return kb

    @classmethod
    def open_or_create(cls, root, params):
        if os.path.exists(os.path.join(root, MANIFEST_NAME)):
            kb = cls.open(root)
            for key, value in params.items():
                if kb.manifest.get(key) != value:
                    raise KBError(
                        "existing store was built with %s=%r, not %r"
                        % (key, kb.manifest.get(key), value))
            return kb
        return cls.create(root, params)

    # -- appends -------------------------------------------------------

    def add_dataset(self, record):
        existing = self.datasets.get(record["dataset_id"])
        if existing is not None:
            if existing != record:
                raise IntegrityError("dataset %s already stored with "
                                     "different content" % record["dataset_id"])
            return
        _append_line(os.path.join(self.root, DATASETS_NAME), record)
        self.datasets[record["dataset_id"]] = record

    def add_pipeline(self, record):
        existing = self.pipelines.get(record["pipeline_id"])
        if existing is not None:
            if existing != record:
                raise IntegrityError("pipeline %s already stored with "
                                     "different content" % record["pipeline_id"])
            return
        _append_line(os.path.join(self.root, PIPELINES_NAME), record)
        self.pipelines[record["pipeline_id"]] = record

    def _check_references(self, record):
        missing = _EXPERIMENT_KEYS - set(record)
        if missing:
            raise IntegrityError("experiment record missing fields: %s"
                                 % sorted(missing))
        if record["dataset_id"] not in self.datasets:
            raise IntegrityError("experiment references unknown dataset %r"
                                 % record["dataset_id"])
        if record["pipeline_id"] not in self.pipelines:
            raise IntegrityError("experiment references unknown pipeline %r"
                                 % record["pipeline_id"])

    def _index_experiment(self, record):
        self.experiments.append(record)
        key = (record["dataset_id"], record["pipeline_id"])
        self._latest[key] = len(self.experiments) - 1

    def append_experiment(self, record):
        self._check_references(record)
        _append_line(os.path.join(self.root, EXPERIMENTS_NAME), record)
        self._index_experiment(record)

    # -- queries -------------------------------------------------------

    def completed_pairs(self):
        return set(self._latest)

    def latest_experiments(self, dataset_id):
        """Last stored record per pipeline for one dataset."""
        out = {}
        for (ds_id, pl_id), idx in self._latest.items():
            if ds_id == dataset_id:
                out[pl_id] = self.experiments[idx]
        return out

    def ok_experiments(self, dataset_id, metric):
        recs = [r for r in self.latest_experiments(dataset_id).values()
                if r["status"] == "ok" and metric in r["metric_means"]]
        return recs

    def query_best(self, dataset_id, metric, top_n=None):
        """Pipelines ranked by mean metric descending; ties go to the
        faster run, then the smaller pipeline_id."""
        if dataset_id not in self.datasets:
            raise KBError("unknown dataset %r" % dataset_id)
        if metric not in self.manifest.get("metrics", ()):
            raise KBError("metric %r is not stored in this knowledge base"
                          % metric)
        recs = self.ok_experiments(dataset_id, metric)
        if not recs:
            raise KBError("no experiments for dataset %r and metric %r"
                          % (dataset_id, metric))
        recs.sort(key=lambda r: (-r["metric_means"][metric],
                                 r["runtime_s"], r["pipeline_id"]))
        if top_n is not None:
            recs = recs[:top_n]
        return [{"pipeline_id": r["pipeline_id"],
                 "algorithm": r["algorithm"],
                 "config": r["config"],
                 "mean": r["metric_means"][metric],
                 "runtime_s": r["runtime_s"]} for r in recs]

    def meta_feature_entries(self):
        """dataset_id -> meta-feature entry dict, in insertion order."""
        return {ds_id: rec["mf"]["entries"]
                for ds_id, rec in self.datasets.items()}

    def stats(self):
        n_list = [rec["n"] for rec in self.datasets.values()]
        p_list = [rec["p"] for rec in self.datasets.values()]
        c_list = [rec["c"] for rec in self.datasets.values()]
        failed = sum(1 for r in self.experiments if r["status"] == "failed")
        return {
            "datasets": len(self.datasets),
            "pipelines": len(self.pipelines),
            "experiments": len(self.experiments),
            "failed_experiments": failed,
            "instances": [int(min(n_list)), int(max(n_list))] if n_list else None,
            "attributes": [int(min(p_list)), int(max(p_list))] if p_list else None,
            "classes": [int(min(c_list)), int(max(c_list))] if c_list else None,
        }
