"""Command-line entrypoint.

One binary, subcommand style: extract-mf, tune, build-kb, recommend,
loo-eval.  Machine-readable reports are newline-delimited JSON whose
first line is the resolved run configuration plus the engine version;
they go to --out (written atomically) or to stdout.  Human-readable
summaries go to stdout when --out is given, to stderr otherwise, so
stdout stays parseable.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

import argparse
import os
import sys
import tempfile

from . import __version__
from .datasets import DatasetError, load_dataset, parse_manifest
from .evaluation import METRICS, EvaluationError, evaluate_pipeline
from .folds import FoldError, stratified_kfold
from .hpo import (SearchError, bayes_opt, genetic_search, grid_search,
                  random_search)
from .hpo.grid import grid_size
from .kb import KBError, KnowledgeBase, create_meta_kb, engine_tag
from .learners.spaces import ALGORITHMS, ConfigError, hp_space
from .mf import extract_all
from .recommend import (RecommendError, loo_eval, recommend_from_entries,
                        recommend_rf, train_rf_metamodel)
from .utils import canonical_json

KB_ENV_VAR = "METACASH_KB"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("error: %s\n" % message)
        raise SystemExit(EXIT_USAGE)


def _write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".ndjson")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Report:
    """ndjson report: run header first, payload records after."""

    def __init__(self, subcommand, args, out=None):
        config = {k: v for k, v in sorted(vars(args).items())
                  if k != "func"}
        self.lines = [canonical_json({
            "record": "run", "subcommand": subcommand,
            "engine": engine_tag(), "version": __version__,
            "config": config})]
        self.out = out

    def add(self, record):
        self.lines.append(canonical_json(record))

    def emit(self):
        text = "\n".join(self.lines) + "\n"
        if self.out:
            _write_atomic(self.out, text)
        else:
            sys.stdout.write(text)

    def say(self, line):
        """Human-readable line, kept off the machine stream."""
        stream = sys.stdout if self.out else sys.stderr
        stream.write(line + "\n")


def _resolve_kb_path(args, must_exist):
    path = args.kb or os.environ.get(KB_ENV_VAR)
    if not path:
        raise UsageError("no knowledge base path: pass --kb or set $%s"
                         % KB_ENV_VAR)
    if must_exist and not os.path.isdir(path):
        raise KBError("knowledge base directory %r does not exist" % path)
    return path


class UsageError(ValueError):
    pass


def _split_csv(text, allowed, what):
    items = tuple(s.strip() for s in text.split(",") if s.strip())
    for item in items:
        if item not in allowed:
            raise UsageError("unknown %s %r (choose from %s)"
                             % (what, item, ", ".join(allowed)))
    if not items:
        raise UsageError("empty %s list" % what)
    return items


# -- subcommands ---------------------------------------------------------


def cmd_extract_mf(args):
    ds = load_dataset(args.dataset, args.target, dataset_id=args.dataset_id)
    mf = extract_all(ds, seed=args.seed)
    report = Report("extract-mf", args, out=args.out)
    report.add({
        "record": "meta_features",
        "dataset_id": mf.dataset_id,
        "catalogue_version": mf.catalogue_version,
        "n_missing": mf.n_missing,
        "values": dict(mf.entries),
        "diagnostics": mf.diagnostics,
    })
    report.emit()
    report.say("extracted %d meta-features (%d missing) from %s"
               % (len(mf.entries), mf.n_missing, mf.dataset_id))
    return EXIT_OK


def _tune_plan(strategy, space, budget):
    """Budget (max objective evaluations) mapped onto each strategy's
    own knobs."""
    if budget < 1:
        raise UsageError("--budget must be at least 1")
    if strategy == "grid":
        per_dim = 1
        while grid_size(space, per_dim + 1) <= budget:
            per_dim += 1
        if grid_size(space, per_dim) > budget:
            raise UsageError("budget %d cannot cover the smallest grid (%d)"
                             % (budget, grid_size(space, per_dim)))
        return {"per_dim": per_dim}
    if strategy == "bayes":
        if budget < 3:
            raise UsageError("bayes needs --budget of at least 3")
        return {"init": min(5, budget - 1)}
    if strategy == "ga":
        if budget < 2:
            raise UsageError("ga needs --budget of at least 2")
        pop = min(10, budget)
        return {"pop_size": pop, "generations": (budget - pop) // (pop - 1)}
    return {}


def cmd_tune(args):
    ds = load_dataset(args.dataset, args.target)
    space = hp_space(args.algorithm)
    plan = stratified_kfold(ds, k=args.cv_k, repeats=args.cv_repeats,
                            seed=args.seed)

    def objective(config):
        scores = evaluate_pipeline(args.algorithm, config, ds, plan,
                                   metrics=(args.metric,), seed=args.seed)
        return scores.mean(args.metric)

    knobs = _tune_plan(args.strategy, space, args.budget)
    if args.strategy == "grid":
        result = grid_search(space, objective, per_dim=knobs["per_dim"])
    elif args.strategy == "random":
        result = random_search(space, objective, budget=args.budget,
                               seed=args.seed)
    elif args.strategy == "bayes":
        result = bayes_opt(space, objective, budget=args.budget,
                           init=knobs["init"], seed=args.seed)
    else:
        result = genetic_search(space, objective, pop_size=knobs["pop_size"],
                                generations=knobs["generations"],
                                seed=args.seed)
    report = Report("tune", args, out=args.out)
    payload = result.to_jsonable()
    payload["record"] = "search_result"
    payload["algorithm"] = args.algorithm
    payload["dataset_id"] = ds.id
    report.add(payload)
    report.emit()
    report.say("%s over %s: best %s=%.4f after %d evaluations"
               % (args.strategy, args.algorithm, args.metric,
                  result.best_score, result.evaluations_used))
    report.say("best config: %s" % canonical_json(result.best_config))
    return EXIT_OK


def cmd_build_kb(args):
    entries = parse_manifest(args.manifest)
    algorithms = _split_csv(args.algorithms, ALGORITHMS, "algorithm")
    metrics = _split_csv(args.metrics, METRICS, "metric")
    root = _resolve_kb_path(args, must_exist=False)
    log = (lambda line: sys.stderr.write(line + "\n")) if args.verbose \
        else None
    kb = create_meta_kb(entries, root, algorithms=algorithms,
                        configs_per_algo=args.configs_per_algo,
                        metrics=metrics, cv=(args.cv_k, args.cv_repeats),
                        seed=args.seed, jobs=args.jobs, limit=args.limit,
                        log=log)
    failed = sum(r["status"] != "ok" for r in kb.experiments)
    report = Report("build-kb", args, out=args.out)
    summary = {"record": "kb_summary", "root": root}
    summary.update(kb.stats())
    summary["failed_experiments"] = failed
    report.add(summary)
    report.emit()
    report.say("knowledge base at %s: %d datasets, %d pipelines, "
               "%d experiments (%d failed)"
               % (root, len(kb.datasets), len(kb.pipelines),
                  len(kb.experiments), failed))
    return EXIT_OK


def cmd_recommend(args):
    root = _resolve_kb_path(args, must_exist=True)
    kb = KnowledgeBase.open(root)
    ds = load_dataset(args.dataset, args.target, dataset_id=args.dataset_id)
    exclude = (ds.id,) if args.exclude_self else ()
    mf = extract_all(ds, seed=args.seed)
    if args.method == "knn":
        rec = recommend_from_entries(mf.entries, kb, args.metric,
                                     k=args.k, top_n=args.top,
                                     exclude=exclude)
    else:
        model = train_rf_metamodel(kb, args.metric, n_trees=args.rf_trees,
                                   seed=args.seed, exclude=exclude)
        candidates = [{"pipeline_id": p, "algorithm": r["algorithm"],
                       "config": r["config"]}
                      for p, r in kb.pipelines.items()]
        rec = recommend_rf(mf.entries, model, candidates,
                           top_n=args.top)
    report = Report("recommend", args, out=args.out)
    if rec.neighbors:
        report.add({"record": "neighbors", "neighbors": rec.neighbors})
    for rank, item in enumerate(rec.items, start=1):
        line = {"record": "recommendation", "rank": rank}
        line.update(item)
        report.add(line)
    report.emit()
    report.say("top %d pipelines for %s by %s (%s):"
               % (len(rec.items), ds.id, args.metric, args.method))
    for rank, item in enumerate(rec.items, start=1):
        report.say("  %2d. %-20s predicted %.4f  %s"
                   % (rank, item["algorithm"], item["predicted"],
                      item["pipeline_id"]))
    if rec.neighbors:
        report.say("neighbors: " + ", ".join(
            "%s (d=%.3f)" % (n["dataset_id"], n["distance"])
            for n in rec.neighbors))
    return EXIT_OK


def cmd_loo_eval(args):
    root = _resolve_kb_path(args, must_exist=True)
    kb = KnowledgeBase.open(root)
    if len(kb.datasets) < 5:
        raise UsageError("leave-one-out needs a knowledge base with at "
                         "least 5 datasets (have %d)" % len(kb.datasets))
    methods = ("knn", "rf") if args.method == "both" else (args.method,)
    result = loo_eval(kb, args.metric, k=args.k, tolerance=args.tolerance,
                      methods=methods, rf_trees=args.rf_trees,
                      baseline_resamples=args.resamples, seed=args.seed)
    report = Report("loo-eval", args, out=args.out)
    if "baseline" in result:
        line = {"record": "baseline"}
        line.update(result["baseline"])
        report.add(line)
    for method in methods:
        summary = dict(result["methods"][method])
        rows = summary.pop("rows")
        line = {"record": "loo_summary", "method": method,
                "metric": args.metric}
        line.update(summary)
        report.add(line)
        for row in rows:
            rline = {"record": "loo_row", "method": method}
            rline.update(row)
            report.add(rline)
    report.emit()
    report.say("leave-one-out over %d datasets, metric=%s, tolerance=%.2f"
               % (len(kb.datasets), args.metric, args.tolerance))
    for method in methods:
        s = result["methods"][method]
        p = (" p=%.3f" % s["p_value"]) if "p_value" in s else ""
        report.say("  %-3s hit_rate=%.2f mean_regret=%.4f max_regret=%.4f%s"
                   % (method, s["hit_rate"], s["mean_regret"],
                      s["max_regret"], p))
    if "baseline" in result:
        report.say("  random-pipeline baseline mean hit_rate=%.2f over %d "
                   "resamples" % (result["baseline"]["mean_hit_rate"],
                                  result["baseline"]["resamples"]))
    return EXIT_OK


# -- parser --------------------------------------------------------------


def build_parser():
    parser = _Parser(prog="metacash",
                     description="Meta-learning engine for algorithm "
                                 "selection and configuration ranking.")
    parser.add_argument("--version", action="version",
                        version="metacash %s (%s)" % (__version__,
                                                      engine_tag()))
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("extract-mf", help="compute the meta-feature vector "
                                          "of one dataset")
    p.add_argument("dataset", help="path to a delimited data file")
    p.add_argument("--target", required=True, help="target column name")
    p.add_argument("--dataset-id", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="report path (ndjson); "
                                               "stdout when omitted")
    p.set_defaults(func=cmd_extract_mf)

    p = sub.add_parser("tune", help="hyperparameter search for one "
                                    "algorithm on one dataset")
    p.add_argument("dataset")
    p.add_argument("--target", required=True)
    p.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    p.add_argument("--strategy", default="random",
                   choices=("grid", "random", "bayes", "ga"))
    p.add_argument("--budget", type=int, default=30,
                   help="maximum objective evaluations")
    p.add_argument("--metric", default="accuracy", choices=METRICS)
    p.add_argument("--cv-k", type=int, default=5)
    p.add_argument("--cv-repeats", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("build-kb", help="evaluate sampled pipelines over a "
                                        "manifest of datasets into a "
                                        "knowledge base")
    p.add_argument("manifest", help="csv with id,path,target columns")
    p.add_argument("--kb", default=None,
                   help="knowledge base directory (or $%s)" % KB_ENV_VAR)
    p.add_argument("--algorithms", default=",".join(ALGORITHMS))
    p.add_argument("--configs-per-algo", type=int, default=50)
    p.add_argument("--metrics", default=",".join(METRICS))
    p.add_argument("--cv-k", type=int, default=5)
    p.add_argument("--cv-repeats", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1,
                   help="concurrent pipeline evaluations")
    p.add_argument("--limit", type=int, default=None,
                   help="stop after this many new experiments (resume "
                        "by rerunning)")
    p.add_argument("--verbose", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_build_kb)

    p = sub.add_parser("recommend", help="rank pipelines for a new dataset")
    p.add_argument("dataset")
    p.add_argument("--target", required=True)
    p.add_argument("--dataset-id", default=None)
    p.add_argument("--kb", default=None)
    p.add_argument("--metric", default="accuracy", choices=METRICS)
    p.add_argument("--method", default="knn", choices=("knn", "rf"))
    p.add_argument("--k", type=int, default=5, help="neighbor count (knn)")
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--rf-trees", type=int, default=500)
    p.add_argument("--exclude-self", action="store_true",
                   help="drop the KB dataset with the query's id")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("loo-eval", help="leave-one-dataset-out scoring of "
                                        "the recommender against the KB")
    p.add_argument("--kb", default=None)
    p.add_argument("--metric", default="accuracy", choices=METRICS)
    p.add_argument("--method", default="both", choices=("knn", "rf", "both"))
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--tolerance", type=float, default=0.05,
                   help="relative slack defining a hit")
    p.add_argument("--rf-trees", type=int, default=500)
    p.add_argument("--resamples", type=int, default=20,
                   help="random-pipeline baseline resamples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_loo_eval)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE
    except SearchError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE
    except (DatasetError, FoldError, ConfigError, EvaluationError,
            KBError, RecommendError, FileNotFoundError) as exc:
        sys.stderr.write("data error: %s\n" % exc)
        return EXIT_DATA
    except (KeyboardInterrupt, SystemExit):
        raise
    except Exception as exc:
        sys.stderr.write("internal error: %s: %s\n"
                         % (type(exc).__name__, exc))
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
