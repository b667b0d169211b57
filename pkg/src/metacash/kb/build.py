"""Knowledge-base construction.

One build walks a dataset manifest, extracts meta-features, samples a
shared set of pipelines per algorithm, and evaluates every (dataset,
pipeline) pair under repeated stratified cross-validation.  All seeds
derive from the build seed plus stable identifiers, so an interrupted
build resumed later produces the same records a single run would have,
and any stored record can be replayed exactly from its own fields.
Pipeline failures become "failed" records rather than aborting.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

import numpy as np

from .. import __version__
from ..datasets import load_dataset
from ..engine import BACKEND_NAME
from ..evaluation import METRICS, evaluate_pipeline, _peak_rss_bytes
from ..folds import stratified_kfold
from ..learners.spaces import ALGORITHMS, hp_space
from ..mf import CATALOGUE_VERSION, extract_all
from ..utils import derive_seed, pipeline_id, stable_digest
from .store import KBError, KnowledgeBase

DEFAULT_CONFIGS_PER_ALGO = 50
DEFAULT_CV = (5, 2)


def engine_tag():
    return "metacash-%s+%s" % (__version__, BACKEND_NAME)


def sample_pipeline_plan(algorithms, configs_per_algo, seed):
    """Shared across datasets: (algorithm, config, pipeline_id) triples in
    a fixed order, with distinct ids per algorithm."""
    plan = []
    for algorithm in algorithms:
        space = hp_space(algorithm)
        rng = np.random.default_rng(derive_seed(seed, "plan", algorithm))
        seen = set()
        attempts = 0
        while len(seen) < configs_per_algo:
            attempts += 1
            if attempts > configs_per_algo * 100:
                raise KBError("cannot draw %d distinct configs for %s"
                              % (configs_per_algo, algorithm))
            cfg = space.sample(rng)
            pl_id = pipeline_id(algorithm, cfg)
            if pl_id in seen:
                continue
            seen.add(pl_id)
            plan.append((algorithm, cfg, pl_id))
    return plan


def evaluation_seed(build_seed, dataset_id, pl_id):
    return derive_seed(build_seed, "eval", dataset_id, pl_id)


def fold_seed(build_seed, dataset_id):
    return derive_seed(build_seed, "folds", dataset_id)


def run_experiment(ds, algorithm, config, pl_id, fold_plan, metrics,
                   build_seed):
    """Evaluate one pipeline on one dataset; never raises for pipeline
    failures."""
    seed = evaluation_seed(build_seed, ds.id, pl_id)
    started = time.time()
    try:
        scores = evaluate_pipeline(algorithm, config, ds, fold_plan,
                                   metrics=metrics, seed=seed)
        status, error = "ok", None
        scores_doc = scores.to_jsonable()
        means = {m: scores.mean(m) for m in metrics}
        runtime = scores.runtime_s
        memory = scores.memory_bytes
    except Exception as exc:
        status = "failed"
        error = "%s: %s" % (type(exc).__name__, exc)
        scores_doc = None
        means = {}
        runtime = time.time() - started
        memory = _peak_rss_bytes()
    return {
        "experiment_id": "ex-" + stable_digest(ds.id, pl_id, str(seed))[:16],
        "dataset_id": ds.id,
        "pipeline_id": pl_id,
        "algorithm": algorithm,
        "config": config,
        "status": status,
        "scores": scores_doc,
        "metric_means": means,
        "error": error,
        "cv": {"k": fold_plan.k, "repeats": fold_plan.repeats},
        "seed": seed,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "runtime_s": runtime,
        "memory_bytes": memory,
        "engine": engine_tag(),
    }


def replay_experiment(kb, record, dataset_cache=None):
    """Re-run a stored experiment from its own fields.

    Returns a freshly computed record; comparing it to the stored one
    through ``stable_experiment_view`` checks everything except wall
    time, memory and timestamp.  Works for failed records too (the same
    failure is reproduced).
    """
    ds_rec = kb.datasets[record["dataset_id"]]
    if dataset_cache is not None and record["dataset_id"] in dataset_cache:
        ds = dataset_cache[record["dataset_id"]]
    else:
        ds = load_dataset(ds_rec["path"], ds_rec["target"],
                          dataset_id=ds_rec["dataset_id"])
        if dataset_cache is not None:
            dataset_cache[record["dataset_id"]] = ds
    plan = stratified_kfold(ds, record["cv"]["k"], record["cv"]["repeats"],
                            seed=fold_seed(kb.manifest["seed"], ds.id))
    return run_experiment(ds, record["algorithm"], record["config"],
                          record["pipeline_id"], plan,
                          tuple(kb.manifest["metrics"]),
                          kb.manifest["seed"])


def create_meta_kb(entries, root, *, algorithms=ALGORITHMS,
                   configs_per_algo=DEFAULT_CONFIGS_PER_ALGO,
                   metrics=METRICS, cv=DEFAULT_CV, seed=0, jobs=1,
                   limit=None, log=None):
    """Build (or resume) the knowledge base at ``root``.

    ``entries`` is a list of ManifestEntry; ``limit`` stops after that
    many new evaluations so long builds can checkpoint and resume.
    """
    entries = list(entries)
    if not entries:
        raise KBError("dataset manifest is empty")
    if configs_per_algo < 1:
        raise KBError("configs_per_algo must be >= 1")
    k, repeats = cv
    params = {
        "catalogue_version": CATALOGUE_VERSION,
        "metrics": list(metrics),
        "cv_k": int(k),
        "cv_repeats": int(repeats),
        "seed": int(seed),
        "algorithms": list(algorithms),
        "configs_per_algo": int(configs_per_algo),
    }
    kb = KnowledgeBase.open_or_create(root, params)

    plan = sample_pipeline_plan(algorithms, configs_per_algo, seed)
    for algorithm, config, pl_id in plan:
        kb.add_pipeline({"pipeline_id": pl_id, "algorithm": algorithm,
                         "config": config})

    datasets = []
    for entry in entries:
        ds = load_dataset(entry.path, entry.target, dataset_id=entry.id)
        datasets.append(ds)
        if ds.id not in kb.datasets:
            mf = extract_all(ds, seed=derive_seed(seed, "mf", ds.id))
            kb.add_dataset({
                "dataset_id": ds.id,
                "name": ds.name,
                "path": entry.path,
                "target": entry.target,
                "n": ds.n, "p": ds.p, "c": ds.c,
                "mf": mf.to_jsonable(),
            })

    done = kb.completed_pairs()
    todo = [(ds, algorithm, config, pl_id)
            for ds in datasets
            for algorithm, config, pl_id in plan
            if (ds.id, pl_id) not in done]
    if limit is not None:
        todo = todo[:limit]

    fold_plans = {}
    for ds in datasets:
        fold_plans[ds.id] = stratified_kfold(ds, k, repeats,
                                             seed=fold_seed(seed, ds.id))

    def run_one(item):
        ds, algorithm, config, pl_id = item
        return run_experiment(ds, algorithm, config, pl_id,
                              fold_plans[ds.id], metrics, seed)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_one, item) for item in todo]
            for i, future in enumerate(futures):
                record = future.result()
                kb.append_experiment(record)
                if log:
                    log("[%d/%d] %s" % (i + 1, len(todo),
                                        record["experiment_id"]))
    else:
        for i, item in enumerate(todo):
            record = run_one(item)
            kb.append_experiment(record)
            if log:
                log("[%d/%d] %s on %s: %s" % (
                    i + 1, len(todo), record["pipeline_id"],
                    record["dataset_id"], record["status"]))
    return kb
